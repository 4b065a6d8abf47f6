"""Continued fractions of log ratios and the bad-approximability exponent.

Partial quotients are produced from interval enclosures: a quotient is
emitted only when both ends of the enclosure have the same floor, so every
returned term is certified.  When an enclosure becomes too wide the working
precision is doubled and the expansion restarted, up to ``max_prec``.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import mpmath
from mpmath import iv, libmp

from ..errors import DomainError, PrecisionExhausted, RationalInput
from ..renewal import _factor, integer_rank, rank_report
from ..scheme import Atom, Scheme


@contextmanager
def _ivprec(prec):
    saved = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = saved


def log_ratio(a, b) -> Callable:
    """Enclosure factory for ``ln a / ln b`` (positive rationals, neither 1)."""
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0 or a == 1 or b == 1:
        raise DomainError("log ratio needs positive arguments other than 1")

    def enclose(prec):
        with _ivprec(prec):
            la = iv.log(iv.mpf(a.numerator)) - iv.log(iv.mpf(a.denominator))
            lb = iv.log(iv.mpf(b.numerator)) - iv.log(iv.mpf(b.denominator))
            return la / lb

    return enclose


def golden_ratio(prec):
    with _ivprec(prec):
        return (1 + iv.sqrt(5)) / 2


@dataclass
class ContinuedFraction:
    quotients: list
    convergents: list  # (p_m, q_m) after each quotient
    stop: str  # "max_terms", "max_denominator"
    prec: int

    def __iter__(self):
        return iter(self.quotients)

    def __len__(self):
        return len(self.quotients)


def _expand(enclosure, max_terms, max_denominator):
    """Certified quotients from one enclosure, and why expansion stopped."""
    out = []
    x = enclosure
    p0, q0, p1, q1 = 1, 0, 0, 1
    while len(out) < max_terms:
        lo, hi = x._mpi_
        a = libmp.to_int(libmp.mpf_floor(lo))
        if libmp.to_int(libmp.mpf_floor(hi)) != a:
            return out, "precision"
        p, q = a * p0 + p1, a * q0 + q1
        if max_denominator is not None and q > max_denominator:
            return out, "max_denominator"
        out.append(int(a))
        p0, q0, p1, q1 = p, q, p0, q0
        frac = x - a
        if libmp.mpf_le(frac._mpi_[0], libmp.fzero):
            return out, "precision"
        x = 1 / frac
    return out, "max_terms"


def _convergents(quotients):
    p0, q0, p1, q1 = 1, 0, 0, 1
    out = []
    for a in quotients:
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        out.append((p0, q0))
    return out


def continued_fraction(
    gamma,
    max_terms: int = 30,
    max_denominator: Optional[int] = None,
    prec: int = 128,
    max_prec: int = 1 << 14,
) -> ContinuedFraction:
    """Partial quotients ``[a0; a1, a2, ...]`` of a certified real.

    ``gamma`` is a callable ``prec -> iv.mpf`` enclosure (see
    :func:`log_ratio`), an interval, or an exact rational.  A rational has a
    finite expansion and raises :class:`RationalInput` carrying it.
    """
    if isinstance(gamma, (Fraction, int)):
        raise RationalInput(f"{gamma} is rational", _rational_quotients(Fraction(gamma)))
    if not callable(gamma):
        fixed = gamma
        gamma = lambda _prec: fixed  # noqa: E731
        max_prec = prec
    best = []
    while prec <= max_prec:
        with _ivprec(prec):
            q, why = _expand(gamma(prec), max_terms, max_denominator)
        if len(q) > len(best):
            best = q
        if why != "precision":
            return ContinuedFraction(q, _convergents(q), why, prec)
        prec *= 2
    raise PrecisionExhausted(
        f"only {len(best)} partial quotients certified at {max_prec} bits", certified=best
    )


def _rational_quotients(x: Fraction):
    out = []
    p, q = x.numerator, x.denominator
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


# -- bad approximability ------------------------------------------------------


@dataclass
class ApproxEstimate:
    r_hat: float
    pair: tuple  # (alpha_j, alpha_k)
    quotients: list
    witness_index: int  # m attaining the max of log a_{m+1} / log q_m
    certified_up_to: int  # largest certified convergent denominator
    q_min: int


def _r_hat(cf: ContinuedFraction, q_min: int):
    best, at = -math.inf, -1
    for m in range(len(cf.quotients) - 1):
        q = cf.convergents[m][1]
        if q < max(q_min, 2):
            continue
        v = math.log(cf.quotients[m + 1]) / math.log(q)
        if v > best:
            best, at = v, m
    return best, at


def estimate_bad_approx_r(scheme: Scheme, pair=None, budget: int = 10**9, q_min: int = 1000) -> ApproxEstimate:
    """Empirical exponent ``r`` in ``|gamma - p/q| >= c / q^(2+r)``.

    ``gamma = ln alpha_j / ln alpha_k``; the estimate is the largest
    ``log a_{m+1} / log q_m`` over convergents with ``q_min <= q_m <= budget``.
    The exponent is asymptotic, so the first few convergents (where a
    quotient of 2 over ``q = 3`` already reads as 0.63) are skipped.  This
    is an empirical estimate from finitely many terms, not a proof.

    Without an explicit pair every independent pair among the distinct
    block ratios is tried and the smallest estimate kept.  A dependent
    pair raises :class:`RationalInput`.
    """
    if pair is None:
        rep = rank_report(scheme)
        if rep.is_rank_one:
            raise DomainError("all log ratios are rational for a rank-one scheme")
        pairs = _independent_pairs(scheme)
    else:
        a, b = (Fraction(v) for v in pair)
        if a == b:
            raise DomainError("the pair must be two different ratios")
        if not _independent(a, b):
            fa = _factor(a)
            p = next(iter(fa))
            raise RationalInput(f"ln {a} / ln {b} is rational", _rational_quotients(Fraction(fa[p], _factor(b)[p])))
        pairs = [(a, b)]
    best = None
    for a, b in pairs:
        cf = continued_fraction(log_ratio(a, b), max_terms=200, max_denominator=budget)
        r, m = _r_hat(cf, q_min)
        if r == -math.inf:
            continue
        est = ApproxEstimate(max(r, 0.0), (a, b), cf.quotients, m, cf.convergents[-1][1], q_min)
        if best is None or est.r_hat < best.r_hat:
            best = est
    if best is None:
        raise DomainError("budget too small to see two convergents")
    return best


def _independent_pairs(scheme: Scheme):
    vals = []
    for b in scheme.blocks:
        for v in (b.length,) if isinstance(b, Atom) else (b.first, b.ratio):
            if v not in vals:
                vals.append(v)
    return [(a, b) for i, a in enumerate(vals) for b in vals[i + 1 :] if _independent(a, b)]


def _independent(a: Fraction, b: Fraction) -> bool:
    """True when ``ln a / ln b`` is irrational, i.e. no common power."""
    fa, fb = _factor(a), _factor(b)
    primes = sorted(set(fa) | set(fb))
    return integer_rank([[fa.get(p, 0) for p in primes], [fb.get(p, 0) for p in primes]]) == 2


def predicted_P_star(r):
    """``(1 - 2r) / (8 (1 + r))``, defined for ``0 <= r < 1/2``."""
    if r < 0 or r >= Fraction(1, 2):
        raise DomainError("the exponent must lie in [0, 1/2)")
    if isinstance(r, int):
        r = Fraction(r)
    return (1 - 2 * r) / (8 * (1 + r))
