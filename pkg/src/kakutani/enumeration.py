"""Word sets, endpoint sets and the refinement ladder of a scheme.

``A(lam)`` is the set of words with length product ``>= lam`` and
``X(lam)`` the set of their left endpoints.  Along the ladder of distinct
maximal lengths ``l_0 = 1 > l_1 > ...`` the endpoint sets coincide with the
left endpoints ``L_n`` of the intervals split by stage ``n + 1``.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, Optional

from . import kernels
from .errors import BudgetExceeded
from .scheme import Scheme, as_fraction, fraction_str

DEFAULT_MAX_POINTS = 5_000_000
DEFAULT_MAX_MEMO = 1_000_000


@dataclass(frozen=True)
class PointSet:
    """Sorted distinct points ``nums[i] / denom`` in [0, 1)."""

    lam: Fraction
    nums: tuple
    denom: int
    n_words: int = 0
    _points: list = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.nums)

    @property
    def points(self) -> list:
        if self._points is None:
            d = self.denom
            object.__setattr__(self, "_points", [Fraction(k, d) for k in self.nums])
        return self._points

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, q):
        q = as_fraction(q)
        if (q * self.denom).denominator != 1:
            return False
        k = (q * self.denom).numerator
        i = bisect.bisect_left(self.nums, k)
        return i < len(self.nums) and self.nums[i] == k

    def count_in(self, a: Fraction, b: Fraction) -> int:
        """Number of points in the half-open interval [a, b)."""
        lo = bisect.bisect_left(self.nums, math.ceil(a * self.denom))
        hi = bisect.bisect_left(self.nums, math.ceil(b * self.denom))
        return hi - lo


def make_pointset(lam, points, n_words=0) -> PointSet:
    """Build a PointSet from arbitrary rationals (deduplicated and sorted)."""
    pts = sorted({as_fraction(p) for p in points})
    if any(p < 0 or p >= 1 for p in pts):
        raise ValueError("points must lie in [0, 1)")
    d = 1
    for p in pts:
        d = d * p.denominator // math.gcd(d, p.denominator)
    return PointSet(as_fraction(lam), tuple(int(p * d) for p in pts), d, n_words)


# -- word enumeration ------------------------------------------------------


def enumerate_A(scheme: Scheme, lam, cap: Optional[int] = None) -> Iterator[tuple]:
    """Every word with length product >= lam, depth first, children left to right."""
    lam = as_fraction(lam)
    if lam > 1:
        return
    emitted = 0
    stack = [((), Fraction(1))]
    while stack:
        word, a = stack.pop()
        emitted += 1
        if cap is not None and emitted > cap:
            raise BudgetExceeded("word enumeration", cap)
        yield word
        children = scheme.symbols_at_least(lam / a)
        for s, sa, _ in reversed(children):
            stack.append((word + (s,), a * sa))


def count_A(scheme: Scheme, lam, max_memo: Optional[int] = DEFAULT_MAX_MEMO, memo: Optional[dict] = None) -> int:
    """``|A(lam)|`` from the renewal recursion, memoised on the exact rational key."""
    lam = as_fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    memo = {} if memo is None else memo
    return _count(scheme, lam, memo, max_memo)


def _count(scheme, lam, memo, max_memo):
    if lam > 1:
        return 0
    hit = memo.get(lam)
    if hit is not None:
        return hit
    total = 1
    for a, mult in Counter(scheme.alphas_at_least(lam)).items():
        total += mult * _count(scheme, lam / a, memo, max_memo)
    memo[lam] = total
    if max_memo is not None and len(memo) > max_memo:
        raise BudgetExceeded("count memo", max_memo)
    return total


def lattice_counts(exponents, progressions=(), M: int = 0) -> list:
    """``|A(x**m)|`` for m = 0..M of a rank-one scheme with base x.

    ``exponents`` are the finite symbol exponents (with multiplicity) and
    each ``(p, q)`` in ``progressions`` is a tail with exponents
    ``p, p+q, p+2q, ...``.  Uses ``|A(x^m)| = 1 + sum_j |A(x^(m-n_j))|``.
    """
    counts = [0] * (M + 1)
    # per tail, S[m] = sum_k counts[m - p - k q], kept as a running table
    sums = [[0] * (M + 1) for _ in progressions]
    for m in range(M + 1):
        c = 1
        for n in exponents:
            if n <= m:
                c += counts[m - n]
        for t, (p, q) in enumerate(progressions):
            if p <= m:
                c += sums[t][m]
        counts[m] = c
        # sums[t][m'] = counts[m'-p] + sums[t][m'-q] for m' where m'-p == m
        for t, (p, q) in enumerate(progressions):
            mm = m + p
            if mm <= M:
                sums[t][mm] = counts[m] + (sums[t][mm - q] if mm - q >= 0 else 0)
    return counts


# -- endpoint sets ---------------------------------------------------------


def _max_word_length(scheme: Scheme, lam: Fraction) -> int:
    amax = scheme.alpha_max
    k, a = 0, Fraction(1)
    while a * amax >= lam:
        a *= amax
        k += 1
    return k


def _grid_denominator(syms, lam: Fraction, K: int) -> int:
    """A common denominator ``D`` for every endpoint and length in ``A(lam)``.

    For each prime ``p`` a word collects at most ``e_p(s)`` factors of
    ``p`` per symbol, where ``e_p(s)`` is the larger ``p``-valuation of the
    denominators of ``alpha_s`` and ``c_s``.  Since the word's ``-log
    alpha_v`` is at most ``-log lam``, the total is at most
    ``max_s e_p(s) / -log(alpha_s)`` times ``-log lam``; that beats the
    blanket ``Q**K`` whenever the alphabet mixes primes.
    """
    from sympy import factorint

    budget = -math.log(lam)
    D = 1
    vals = [(a, c, factorint(a.denominator), factorint(c.denominator)) for _, a, c in syms]
    primes = sorted({p for _, _, fa, fc in vals for p in (*fa, *fc)})
    for p in primes:
        emax = 0
        rate = 0.0
        for a, _, fa, fc in vals:
            e = max(fa.get(p, 0), fc.get(p, 0))
            emax = max(emax, e)
            if e:
                rate = max(rate, e / -math.log(a))
        # floor(x) + 1 > x absorbs float rounding in the product
        k = min(K * emax, math.floor(rate * budget * (1 + 1e-12)) + 1)
        D *= p**k
    return D


def point_set(
    scheme: Scheme,
    lam,
    max_points: Optional[int] = DEFAULT_MAX_POINTS,
    backend: Optional[str] = None,
) -> PointSet:
    """``X(lam)``: distinct left endpoints of the words in ``A(lam)``.

    Words are walked on a common integer grid ``D`` (see
    :func:`_grid_denominator`) so every endpoint is an exact integer
    numerator.
    """
    lam = as_fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if lam > 1:
        return PointSet(lam, (), 1, 0)
    n_words = count_A(scheme, lam)
    if max_points is not None and n_words > max_points:
        raise BudgetExceeded("point generation", max_points)
    syms = scheme.symbols_at_least(lam)
    Q = 1
    for _, a, c in syms:
        for v in (a, c):
            Q = Q * v.denominator // math.gcd(Q, v.denominator)
    K = _max_word_length(scheme, lam)
    D = _grid_denominator(syms, lam, K)
    A = [int(a * Q) for _, a, _ in syms]
    C = [int(c * Q) for _, _, c in syms]
    T = math.ceil(lam * D)
    raw = kernels.scaled_endpoints(A, C, Q, D, T, n_words, K, backend=backend)
    return _canonical(lam, raw, D, n_words)


def _canonical(lam, raw, D, n_words) -> PointSet:
    if hasattr(raw, "dtype"):
        import numpy as np

        uniq = np.unique(raw)
        g = int(np.gcd.reduce(uniq)) if len(uniq) else 0
        g = math.gcd(g, D)
        nums = tuple(int(v) // g for v in uniq)
    else:
        uniq = sorted(set(raw))
        g = D
        for v in uniq:
            g = math.gcd(g, v)
        nums = tuple(v // g for v in uniq)
    return PointSet(lam, nums, D // g, n_words)


def point_set_by_words(scheme: Scheme, lam, cap: Optional[int] = None) -> PointSet:
    """Reference path: fold every word of ``A(lam)`` in exact rationals."""
    lam = as_fraction(lam)
    if lam > 1:
        return PointSet(lam, (), 1, 0)
    pts = set()
    n = 0
    stack = [(Fraction(0), Fraction(1))]
    while stack:
        left, a = stack.pop()
        pts.add(left)
        n += 1
        if cap is not None and n > cap:
            raise BudgetExceeded("word enumeration", cap)
        for s, sa, sc in scheme.symbols_at_least(lam / a):
            stack.append((left + a * sc, a * sa))
    return make_pointset(lam, pts, n_words=n)


# -- the ladder of maximal lengths -------------------------------------------


class _DistinctAlphas:
    """The distinct contraction ratios in decreasing order, produced lazily."""

    def __init__(self, scheme: Scheme):
        self._heap = []
        for i, b in enumerate(scheme.blocks):
            if i in scheme.tail_blocks:
                heapq.heappush(self._heap, (-b.first, i, 0))
            else:
                heapq.heappush(self._heap, (-b.length, i, 0))
        self._scheme = scheme
        self.values = []

    def __getitem__(self, j: int):
        while len(self.values) <= j:
            if not self._heap:
                return None
            neg, i, k = heapq.heappop(self._heap)
            b = self._scheme.blocks[i]
            if i in self._scheme.tail_blocks:
                heapq.heappush(self._heap, (-(b.first * b.ratio ** (k + 1)), i, k + 1))
            a = -neg
            if not self.values or self.values[-1] != a:
                self.values.append(a)
        return self.values[j]


def iter_ladder(scheme: Scheme, max_heap: Optional[int] = DEFAULT_MAX_MEMO) -> Iterator[Fraction]:
    """Distinct word lengths in strictly decreasing order, starting at 1.

    Best-first search over the product semigroup: each popped value ``v``
    reached as ``u * alphas[j]`` queues its successor ``u * alphas[j+1]``
    and its first child ``v * alphas[0]``.
    """
    alphas = _DistinctAlphas(scheme)
    heap = [(-Fraction(1), Fraction(1), -1)]
    last = None
    while heap:
        neg, base, j = heapq.heappop(heap)
        v = -neg
        if j >= 0:
            nxt = alphas[j + 1]
            if nxt is not None:
                heapq.heappush(heap, (-(base * nxt), base, j + 1))
        if v == last:
            continue
        last = v
        yield v
        heapq.heappush(heap, (-(v * alphas[0]), v, 0))
        if max_heap is not None and len(heap) > max_heap:
            raise BudgetExceeded("ladder heap", max_heap)


def length_ladder(scheme: Scheme, n: int) -> list:
    if n < 0:
        raise ValueError("n must be >= 0")
    out = []
    for v in iter_ladder(scheme):
        out.append(v)
        if len(out) == n + 1:
            break
    return out


def n_of_lambda(scheme: Scheme, lam) -> int:
    """The ladder index with ``l_n >= lam > l_(n+1)``."""
    lam = as_fraction(lam)
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    n = -1
    for v in iter_ladder(scheme):
        if v < lam:
            return n
        n += 1
    return n


def L_n(scheme: Scheme, n: int, **kw) -> PointSet:
    return point_set(scheme, length_ladder(scheme, n)[-1], **kw)


@dataclass
class PartitionLevel:
    n: int
    intervals: list  # (word, left, length), sorted by left
    missing_mass: Fraction

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def endpoints(self) -> list:
        return sorted({e for _, a, l in self.intervals for e in (a, a + l)})


def partition_level(scheme: Scheme, n: int, min_len, cap: Optional[int] = DEFAULT_MAX_POINTS) -> PartitionLevel:
    """Members of ``P_n`` no shorter than ``min_len``.

    ``missing_mass`` is the total length of the members not reported.
    """
    min_len = as_fraction(min_len)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return PartitionLevel(0, [((), Fraction(0), Fraction(1))], Fraction(0))
    split = length_ladder(scheme, n - 1)[-1]
    out = []
    stack = [((), Fraction(0), Fraction(1))]
    seen = 0
    while stack:
        word, left, a = stack.pop()
        for s, sa, sc in scheme.symbols_at_least(min_len / a):
            child = (word + (s,), left + a * sc, a * sa)
            if child[2] >= split:
                stack.append(child)
            else:
                out.append(child)
                seen += 1
                if cap is not None and seen > cap:
                    raise BudgetExceeded("partition listing", cap)
    out.sort(key=lambda t: t[1])
    shown = sum((t[2] for t in out), Fraction(0))
    return PartitionLevel(n, out, 1 - shown)


def split_endpoints(scheme: Scheme, n: int) -> list:
    """Both endpoints of every interval split by stage ``n + 1``."""
    lam = length_ladder(scheme, n)[-1]
    ends = set()
    stack = [(Fraction(0), Fraction(1))]
    while stack:
        left, a = stack.pop()
        ends.add(left)
        ends.add(left + a)
        for _, sa, sc in scheme.symbols_at_least(lam / a):
            stack.append((left + a * sc, a * sa))
    return sorted(ends)


# -- export ----------------------------------------------------------------


def decimal_str(q: Fraction, digits: int = 20) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def pointset_csv(ps: PointSet, digits: int = 20) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "point_exact", "point_float"])
    for i, p in enumerate(ps.points):
        w.writerow([i, fraction_str(p), decimal_str(p, digits)])
    return buf.getvalue()


def pointset_json(ps: PointSet, digits: int = 20) -> str:
    doc = {
        "lambda": fraction_str(ps.lam),
        "n_points": len(ps),
        "n_words": ps.n_words,
        "points": [fraction_str(p) for p in ps.points],
        "points_float": [decimal_str(p, digits) for p in ps.points],
    }
    return json.dumps(doc, indent=2) + "\n"


def ladder_csv(values, digits: int = 20) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "length_exact", "length_float"])
    for i, v in enumerate(values):
        w.writerow([i, fraction_str(v), decimal_str(v, digits)])
    return buf.getvalue()


def ladder_json(values, digits: int = 20) -> str:
    doc = {
        "ladder": [fraction_str(v) for v in values],
        "ladder_float": [decimal_str(v, digits) for v in values],
    }
    return json.dumps(doc, indent=2) + "\n"
