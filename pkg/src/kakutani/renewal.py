"""Entropy, rank and renewal asymptotics of the word counts ``|A(lam)|``.

The rank of the ratios is computed exactly: every generator (an atom
length, or a tail's first length and ratio) is factored into a vector of
prime exponents and the rank of that integer matrix is the rank of the
group generated by the logarithms.

Two constants are reported for rank-one schemes.  The renewal density
``1/H`` is the continuous-time limit; sampled on the lattice ``x**n`` the
quantity ``x**n * |A(x**n)|`` instead tends to ``span / (H * (1 - x))``
with ``span = -log x``.  The dyadic scheme, where ``|A(2**-n)| = 2**(n+1) - 1``,
shows the difference: the limit is 2, not ``1/log 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .enumeration import count_A, lattice_counts
from .scheme import Atom, GeoTail, Scheme, as_fraction, fraction_str

DEFAULT_PREC = 200
INFINITE = "infinite"

LATTICE_NOTE = (
    "For rank-one schemes x^n |A(x^n)| converges to span/(H (1-x)) with "
    "span = -log x, not to the renewal density 1/H; both are reported. "
    "The dyadic scheme (|A(2^-n)| = 2^(n+1) - 1, limit 2 rather than "
    "1/log 2) is the witness. Equidistribution is unaffected because "
    "only ratios of counts enter."
)


def _mpf(q) -> mpmath.mpf:
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(q)


@dataclass
class EntropyValue:
    value: mpmath.mpf
    prec: int
    exact_terms: str

    def __float__(self):
        return float(self.value)

    def digits(self, n: Optional[int] = None) -> str:
        n = n or max(15, int(self.prec * math.log10(2)) - 5)
        return mpmath.nstr(self.value, n, strip_zeros=False)


def entropy(scheme: Scheme, prec: int = DEFAULT_PREC) -> EntropyValue:
    """``H = -sum a log a`` with tails in closed form."""
    terms = []
    with mpmath.workprec(prec + 20):
        h = mpmath.mpf(0)
        for b in scheme.blocks:
            if isinstance(b, Atom):
                a = _mpf(b.length)
                h -= a * mpmath.log(a)
                terms.append(f"-({fraction_str(b.length)}) log({fraction_str(b.length)})")
            else:
                a, r = _mpf(b.first), _mpf(b.ratio)
                h -= a / (1 - r) * mpmath.log(a) + a * r / (1 - r) ** 2 * mpmath.log(r)
                fa, fr = fraction_str(b.first), fraction_str(b.ratio)
                terms.append(f"-(a/(1-r)) log a - (a r/(1-r)^2) log r [a={fa}, r={fr}]")
        h = +h
    return EntropyValue(h, prec, " + ".join(terms))


# -- rank --------------------------------------------------------------------


def _factor(q: Fraction) -> dict:
    from sympy import factorint

    out = dict(factorint(q.numerator)) if q.numerator > 1 else {}
    if q.denominator > 1:
        for p, e in factorint(q.denominator).items():
            out[p] = out.get(p, 0) - e
    return out


def integer_rank(rows) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [p[col] * x - f * y for x, y in zip(m[i], p)]
                g = math.gcd(*m[i]) if any(m[i]) else 1
                if g > 1:
                    m[i] = [x // g for x in m[i]]
        rank += 1
        if rank == len(m):
            break
    return rank


@dataclass
class RankReport:
    rank: object  # int, or INFINITE for symbolic families
    minimal_base: Optional[Fraction] = None
    exponents: dict = field(default_factory=dict)  # atom symbol -> n
    progressions: dict = field(default_factory=dict)  # tail block -> (p, q)
    generators: list = field(default_factory=list)  # (label, {prime: exponent})
    primes: list = field(default_factory=list)

    @property
    def is_rank_one(self) -> bool:
        return self.rank == 1


def _generators(scheme: Scheme) -> list:
    gens = []
    for i, b in enumerate(scheme.blocks):
        if isinstance(b, Atom):
            gens.append((("atom", i), b.length))
        else:
            gens.append((("first", i), b.first))
            gens.append((("ratio", i), b.ratio))
    return gens


def rank_report(scheme: Scheme) -> RankReport:
    gens = [(label, q, _factor(q)) for label, q in _generators(scheme)]
    primes = sorted({p for _, _, f in gens for p in f})
    rows = [[f.get(p, 0) for p in primes] for _, _, f in gens]
    rank = integer_rank(rows)
    rep = RankReport(rank, generators=[(label, f) for label, _, f in gens], primes=primes)
    if rank != 1:
        return rep
    # every row is an integer multiple of one primitive vector
    base_row = next(r for r in rows if any(r))
    g0 = math.gcd(*base_row)
    prim = [x // g0 for x in base_row]
    piv = next(j for j, x in enumerate(prim) if x)
    mults = [r[piv] // prim[piv] for r in rows]
    g = math.gcd(*mults)
    mults = [m // g for m in mults]
    if mults[0] < 0:
        mults = [-m for m in mults]
        prim = [-x for x in prim]
    gen = [g * x for x in prim]
    x = Fraction(1)
    for p, e in zip(primes, gen):
        x *= Fraction(p) ** e
    rep.minimal_base = x
    it = iter(zip([label for label, _, _ in gens], mults))
    for label, n in it:
        kind, i = label
        if kind == "atom":
            rep.exponents[(i, 0)] = n
        else:
            _, q = next(it)
            rep.progressions[i] = (n, q)
    return rep


# -- summability and limits ----------------------------------------------------


def eps_summability(scheme, eps, prec: int = DEFAULT_PREC):
    """``sum a**(1-eps)``; ``INFINITE`` when the series diverges."""
    if isinstance(scheme, SymbolicFamily):
        return scheme.eps_summability(eps, prec)
    with mpmath.workprec(prec + 20):
        e = _mpf(as_fraction(eps) if not isinstance(eps, float) else eps)
        if not 0 < e < 1:
            raise ValueError("eps must lie in (0, 1)")
        t = 1 - e
        total = mpmath.mpf(0)
        for b in scheme.blocks:
            if isinstance(b, Atom):
                total += _mpf(b.length) ** t
            else:
                total += _mpf(b.first) ** t / (1 - _mpf(b.ratio) ** t)
        return +total


@dataclass
class Limit:
    mode: str  # "lattice" or "non-lattice"
    constant: mpmath.mpf
    renewal_density: mpmath.mpf  # 1/H, reported alongside
    span: Optional[mpmath.mpf] = None
    base: Optional[Fraction] = None


def predicted_limit(scheme: Scheme, prec: int = DEFAULT_PREC, rank: Optional[RankReport] = None) -> Limit:
    rank = rank or rank_report(scheme)
    H = entropy(scheme, prec).value
    with mpmath.workprec(prec + 20):
        density = 1 / H
        if rank.is_rank_one:
            x = rank.minimal_base
            span = -mpmath.log(_mpf(x))
            return Limit("lattice", span / (H * (1 - _mpf(x))), density, span, x)
        return Limit("non-lattice", density, density)


def renewal_sequence(scheme: Scheme, lambdas, memo: Optional[dict] = None, max_memo=None) -> list:
    """``(lam, |A(lam)|, lam * |A(lam)|)`` along a grid, sharing one memo."""
    memo = {} if memo is None else memo
    out = []
    for lam in lambdas:
        lam = as_fraction(lam)
        c = count_A(scheme, lam, memo=memo, max_memo=max_memo)
        out.append((lam, c, lam * c))
    return out


def lattice_sequence(rank: RankReport, M: int) -> list:
    """``|A(x**m)|`` for m = 0..M straight from the exponent recurrence."""
    if not rank.is_rank_one:
        from .errors import NotRankOne

        raise NotRankOne("lattice recurrence needs a rank-one scheme")
    return lattice_counts(list(rank.exponents.values()), list(rank.progressions.values()), M)


def log_grid(per_decade: int, first_decade: int, last_decade: int) -> list:
    """Rationals ``1/round(10**(k/per_decade))``, strictly decreasing."""
    out = []
    for k in range(first_decade * per_decade, last_decade * per_decade + 1):
        lam = Fraction(1, round(10 ** (k / per_decade)))
        if not out or lam < out[-1]:
            out.append(lam)
    return out


def loglog_slope(lambdas, errors) -> tuple:
    """Least-squares slope of ``log e`` against ``log lam``, with its standard error."""
    import numpy as np

    x = np.log([float(l) for l in lambdas])
    y = np.log([float(e) for e in errors])
    if not np.all(np.isfinite(y)):
        from .errors import DegenerateData

        raise DegenerateData("renewal errors must be positive")
    coef, cov = np.polyfit(x, y, 1, cov=True)
    return float(coef[0]), float(math.sqrt(cov[0][0]))


@dataclass
class RenewalErrorExperiment:
    slope: float
    stderr: float
    lambdas: list
    errors: list
    constant: float


def renewal_error_slope(scheme: Scheme, lambdas=None, prec: int = 64) -> RenewalErrorExperiment:
    """Fit the decay of ``|lam |A(lam)| - c|`` on a log-log scale.

    A power law ``O(lam**eps)`` would show a slope near ``eps``; a slope
    near zero means the error decays slower than any power.  Rank-one
    schemes are sampled along their lattice, others on a dense decade grid.
    """
    rank = rank_report(scheme)
    lim = predicted_limit(scheme, prec, rank)
    c = lim.constant
    if lambdas is None:
        if rank.is_rank_one:
            x = rank.minimal_base
            lo = max(1, math.ceil(4 * math.log(10) / -math.log(x)))
            hi = math.floor(14 * math.log(10) / -math.log(x))
            lambdas = [x**k for k in range(lo, hi + 1)]
        else:
            lambdas = log_grid(10, 4, 14)
    seq = renewal_sequence(scheme, lambdas)
    errors = [abs(_mpf(v) - c) for _, _, v in seq]
    slope, se = loglog_slope(lambdas, errors)
    return RenewalErrorExperiment(slope, se, list(lambdas), [float(e) for e in errors], float(c))


# -- symbolic families ---------------------------------------------------------


class SymbolicFamily:
    """A partition known only through its length multiset (no endpoints)."""

    name = ""
    rank: object = INFINITE

    def entropy(self, prec: int = DEFAULT_PREC):
        raise NotImplementedError

    def eps_summability(self, eps, prec: int = DEFAULT_PREC):
        raise NotImplementedError


class ZetaFamily(SymbolicFamily):
    """Lengths ``n**-s`` for n >= 2, with ``s`` solving ``zeta(s) = 2``."""

    name = "zeta"
    rank = INFINITE

    def s(self, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec + 20):
            return mpmath.findroot(lambda s: mpmath.zeta(s) - 2, mpmath.mpf("1.7"))

    def entropy(self, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec + 20):
            s = self.s(prec)
            return -s * mpmath.zeta(s, derivative=1)

    def eps_summability(self, eps, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec + 20):
            t = self.s(prec) * (1 - _mpf(as_fraction(eps) if not isinstance(eps, float) else eps))
            if t <= 1:
                return INFINITE
            return mpmath.zeta(t) - 1


class CantorComplement(SymbolicFamily):
    """Gaps of the middle-third Cantor set: ``2**k`` intervals of length ``3**-(k+1)``."""

    name = "cantor-complement"
    rank = 1
    base = Fraction(1, 3)

    def entropy(self, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec + 20):
            return 3 * mpmath.log(3)

    def eps_summability(self, eps, prec: int = DEFAULT_PREC):
        with mpmath.workprec(prec + 20):
            t = 1 - _mpf(as_fraction(eps) if not isinstance(eps, float) else eps)
            q = 2 * mpmath.mpf(3) ** (-t)
            if q >= 1:
                return INFINITE
            return mpmath.mpf(3) ** (-t) / (1 - q)


SYMBOLIC = {"zeta": ZetaFamily(), "cantor-complement": CantorComplement()}


def report_fragment(scheme: Scheme, prec: int = DEFAULT_PREC) -> dict:
    """The renewal part of the analysis report, all reals as decimal strings."""
    rank = rank_report(scheme)
    H = entropy(scheme, prec)
    lim = predicted_limit(scheme, prec, rank)
    digits = max(15, int(prec * math.log10(2)) - 5)

    def s(v):
        return mpmath.nstr(v, digits, strip_zeros=False)

    doc = {
        "rank": rank.rank,
        "entropy": {"value": s(H.value), "precision_bits": prec, "terms": H.exact_terms},
        "limit": {
            "mode": lim.mode,
            "constant": s(lim.constant),
            "renewal_density": s(lim.renewal_density),
        },
    }
    if rank.is_rank_one:
        doc["minimal_base"] = fraction_str(rank.minimal_base)
        doc["exponents"] = [n for _, n in sorted(rank.exponents.items())]
        doc["progressions"] = [list(pq) for _, pq in sorted(rank.progressions.items())]
        doc["limit"]["span"] = s(lim.span)
        doc["limit"]["note"] = LATTICE_NOTE
    return doc
