"""Slow, independent reference computations used by the tests.

Nothing here calls into the library's enumeration or discrepancy code; the
only shared piece is the :class:`Scheme` data structure itself.
"""

from __future__ import annotations

import math
from fractions import Fraction

from kakutani.scheme import Atom, GeoTail


def symbol_table(scheme, lam):
    """``(symbol, alpha, left)`` for every symbol with alpha >= lam, built from the blocks."""
    out = []
    off = Fraction(0)
    for i, b in enumerate(scheme.blocks):
        if isinstance(b, Atom):
            if b.length >= lam:
                out.append(((i, 0), b.length, off))
            off += b.length
            continue
        lengths = []
        a = b.first
        while a >= lam:
            lengths.append(a)
            a *= b.ratio
        mass = b.first / (1 - b.ratio)
        if b.direction == "asc":
            pos = off
            for k, a in enumerate(lengths):
                out.append(((i, k), a, pos))
                pos += a
        else:
            # lengths shrink towards the left end of the block
            for k, a in enumerate(lengths):
                right = off + mass - sum(b.first * b.ratio**j for j in range(k))
                out.append(((i, k), a, right - a))
        off += mass
    return sorted(out, key=lambda t: t[2])


def words_bruteforce(scheme, lam):
    """All words with length product >= lam, grown one letter at a time.

    ``A(lam)`` is prefix closed, so level ``n + 1`` is every extension of a
    level ``n`` word that stays above the threshold.
    """
    lam = Fraction(lam)
    if lam > 1:
        return []
    table = symbol_table(scheme, lam)
    out = [()]
    level = [((), Fraction(1))]
    while level:
        nxt = []
        for w, a in level:
            for s, sa, _ in table:
                if a * sa >= lam:
                    nxt.append((w + (s,), a * sa))
        out.extend(w for w, _ in nxt)
        level = nxt
    return out


def left_endpoint(scheme, word, lam=Fraction(1, 10**9)):
    """``T_v(0)`` composing maps right to left."""
    info = {s: (a, c) for s, a, c in symbol_table(scheme, min(lam, _min_alpha(scheme, word)))}
    x = Fraction(0)
    for s in reversed(word):
        a, c = info[s]
        x = c + a * x
    return x


def _min_alpha(scheme, word):
    return min([scheme.alpha(s) for s in word], default=Fraction(1))


def endpoints_bruteforce(scheme, lam):
    words = words_bruteforce(scheme, lam)
    return sorted({left_endpoint(scheme, w, lam) for w in words})


def discrepancy_bruteforce(points):
    """Extreme and star discrepancy of a finite point set straight from the definition.

    The sup over intervals is attained with endpoints in the point set or
    {0, 1}, on either side (open or closed).  Every combination is scored.
    """
    pts = sorted(points)
    n = len(pts)
    cands = sorted(set(pts) | {Fraction(0), Fraction(1)})
    ext = Fraction(0)
    star = Fraction(0)
    for i, a in enumerate(cands):
        for b in cands[i:]:
            for lo_closed in (True, False):
                for hi_closed in (True, False):
                    cnt = sum(
                        1
                        for p in pts
                        if (a <= p if lo_closed else a < p) and (p <= b if hi_closed else p < b)
                    )
                    d = abs(Fraction(cnt, n) - (b - a))
                    ext = max(ext, d)
                    if a == 0 and lo_closed:
                        star = max(star, d)
    return ext, star


def dyadic_count(n):
    return 2 ** (n + 1) - 1
