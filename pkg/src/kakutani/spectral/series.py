"""Rank-one generating function and its radius of holomorphy.

For a rank-one scheme every ratio is ``x**n_j``.  The counts satisfy

    sum_n |A(x^n)| z^n = 1 / ((1 - z) (1 - sum_j z^(n_j)))

so ``g(z) = (z - x) sum_n |A(x^n)| z^n`` is rational.  Its Taylor
coefficients ``b_n`` decay like ``R**-n`` for any ``R`` below ``R*``, the
smaller of ``x**(1-eps)`` and the modulus of the nearest root other than
``x`` of ``sum_j z^(n_j) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from ..errors import NotRankOne, NumericError
from ..renewal import DEFAULT_PREC, _mpf, rank_report
from ..scheme import Scheme

# -- integer polynomials as coefficient lists, lowest degree first ---------------


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_add(a, b):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def poly_trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def monomial(n, c=1):
    return [0] * n + [c]


@dataclass
class PowerBasis:
    """Exponents of a rank-one family over its base ``x``.

    ``exponents`` lists the finite symbols (with multiplicity); each
    ``(p, q)`` in ``progressions`` stands for ``p, p+q, p+2q, ...``.
    """

    exponents: list
    progressions: list = field(default_factory=list)
    exact_base: Optional[Fraction] = None
    prec: int = DEFAULT_PREC
    _base: object = field(default=None, repr=False)
    _radius: object = field(default=None, repr=False)

    def __post_init__(self):
        if not self.exponents and not self.progressions:
            raise ValueError("empty power basis")
        if any(n <= 0 for n in self.exponents) or any(p <= 0 or q <= 0 for p, q in self.progressions):
            raise ValueError("exponents must be positive")
        g = math.gcd(*self.exponents, *[v for pq in self.progressions for v in pq])
        if g != 1:
            raise ValueError(f"exponents share the factor {g}; the base is not minimal")

    @classmethod
    def from_scheme(cls, scheme: Scheme, prec: int = DEFAULT_PREC) -> "PowerBasis":
        rep = rank_report(scheme)
        if not rep.is_rank_one:
            raise NotRankOne(f"scheme has rank {rep.rank}")
        return cls(
            [n for _, n in sorted(rep.exponents.items())],
            [pq for _, pq in sorted(rep.progressions.items())],
            exact_base=rep.minimal_base,
            prec=prec,
        )

    def power_sum(self, z):
        """``sum_j z^(n_j)`` with tails in closed form (needs ``|z| < 1``)."""
        s = 0
        for n in self.exponents:
            s += z**n
        for p, q in self.progressions:
            s += z**p / (1 - z**q)
        return s

    def _power_sum_deriv(self, z):
        s = 0
        for n in self.exponents:
            s += n * z ** (n - 1)
        for p, q in self.progressions:
            d = 1 - z**q
            s += (p * z ** (p - 1) * d + q * z ** (p + q - 1)) / d**2
        return s

    @property
    def base(self):
        """The root of ``sum_j z^(n_j) = 1`` in (0, 1), as an mpf."""
        if self._base is None:
            self._compute_base()
        return self._base

    @property
    def base_radius(self):
        if self._radius is None:
            self._compute_base()
        return self._radius

    def _compute_base(self):
        with mpmath.workprec(self.prec + 30):
            if self.exact_base is not None:
                self._base = _mpf(self.exact_base)
                self._radius = mpmath.mpf(0)
                return
            # power_sum is increasing on (0, 1): bisect for a bracket, then polish
            if not self.progressions and len(self.exponents) < 2:
                raise NumericError("power sum never exceeds 1 on (0, 1)")
            lo, hi = mpmath.mpf(0), mpmath.mpf(1)
            for _ in range(60):
                mid = (lo + hi) / 2
                if self.power_sum(mid) < 1:
                    lo = mid
                else:
                    hi = mid
            x = (lo + hi) / 2
            x = mpmath.findroot(lambda z: self.power_sum(z) - 1, x)
            eps = mpmath.mpf(2) ** (-(self.prec - 8))
            if not (self.power_sum(x - eps) < 1 < self.power_sum(x + eps)):
                raise NumericError("could not certify the base root")
            self._base = x
            self._radius = eps


def golden_basis(prec: int = DEFAULT_PREC) -> PowerBasis:
    """Exponents [1, 2]: the base is ``(sqrt 5 - 1) / 2``."""
    return PowerBasis([1, 2], prec=prec)


def _basis(obj, prec) -> PowerBasis:
    if isinstance(obj, PowerBasis):
        return obj
    if isinstance(obj, Scheme):
        return PowerBasis.from_scheme(obj, prec)
    raise TypeError(f"expected a Scheme or PowerBasis, got {type(obj).__name__}")


def denominator_series(basis) -> tuple:
    """``(num, den)`` integer polynomials with ``sum_j z^(n_j) - 1 = num/den``."""
    pb = _basis(basis, DEFAULT_PREC)
    den = [1]
    for _, q in pb.progressions:
        den = poly_mul(den, poly_add([1], monomial(q, -1)))
    finite = [-1]
    for n in pb.exponents:
        finite = poly_add(finite, monomial(n))
    num = poly_mul(finite, den)
    for t, (p, _) in enumerate(pb.progressions):
        others = [1]
        for s, (_, q) in enumerate(pb.progressions):
            if s != t:
                others = poly_mul(others, poly_add([1], monomial(q, -1)))
        num = poly_add(num, poly_mul(monomial(p), others))
    return poly_trim(num), poly_trim(den)


def taylor_g(basis, N: int, prec: int = DEFAULT_PREC) -> list:
    """Taylor coefficients ``b_0..b_N`` of ``g``; exact Fractions for a rational base."""
    pb = _basis(basis, prec)
    num, den = denominator_series(pb)
    if pb.exact_base is not None:
        x = pb.exact_base
        one = Fraction(1)
    else:
        x = pb.base
        one = mpmath.mpf(1)
    # g = (z - x) den / ((z - 1) num)
    top = [c * one for c in poly_add(poly_mul([0, 1], den), [-x * c for c in den])]
    bottom = [c * one for c in poly_mul([-1, 1], num)]
    s0 = bottom[0]
    if s0 == 0:
        raise NumericError("generating function has a pole at 0")
    with mpmath.workprec(prec + 30):
        b = []
        for n in range(N + 1):
            acc = top[n] if n < len(top) else 0 * one
            for k in range(1, min(n, len(bottom) - 1) + 1):
                acc -= bottom[k] * b[n - k]
            b.append(acc / s0)
    return b


# -- certified polynomial roots --------------------------------------------------


@dataclass
class RootEnclosure:
    center: mpmath.mpc
    radius: mpmath.mpf
    multiplicity: int = 1

    @property
    def modulus(self):
        return abs(self.center)


def _horner(coeffs_high, z):
    p = 0
    dp = 0
    for c in coeffs_high:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def certified_roots(coeffs_low, prec: int = DEFAULT_PREC) -> list:
    """All roots of an integer polynomial with rigorous inclusion disks.

    For any ``z`` the disk of radius ``deg * |p(z)/p'(z)|`` about ``z``
    contains a root.  Approximations come from ``mpmath.polyroots``; when
    the resulting disks are pairwise disjoint each holds exactly one root.
    Overlapping disks are merged into one enclosure with the combined
    multiplicity.
    """
    c = poly_trim(coeffs_low)
    deg = len(c) - 1
    if deg < 1:
        return []
    high = list(reversed(c))
    with mpmath.workprec(prec + 40):
        approx = mpmath.polyroots([mpmath.mpf(v) for v in high], maxsteps=400, extraprec=prec + 40)
        approx = [mpmath.mpc(z) for z in approx]
        # polish each approximation
        polished = []
        for z in approx:
            for _ in range(8):
                p, dp = _horner(high, z)
                if dp == 0:
                    break
                step = p / dp
                z = z - step
                if abs(step) < mpmath.mpf(2) ** (-(prec + 30)):
                    break
            polished.append(z)
        encl = []
        # round-off allowance on |p| for the evaluation at this precision
        ulp = mpmath.mpf(2) ** (-(prec + 30))
        for z in polished:
            p, dp = _horner(high, z)
            mag = sum(abs(v) * abs(z) ** i for i, v in enumerate(c))
            if dp == 0:
                r = mpmath.inf
            else:
                r = deg * (abs(p) + mag * ulp * (deg + 1)) / abs(dp)
            encl.append(RootEnclosure(z, +r))
        merged = _merge(encl)
    return merged


def _merge(encl):
    groups = [[e] for e in encl]
    changed = True
    while changed:
        changed = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(a.center - b.center) <= a.radius + b.radius for a in groups[i] for b in groups[j]):
                    groups[i].extend(groups.pop(j))
                    changed = True
                    break
            if changed:
                break
    out = []
    for g in groups:
        if len(g) == 1:
            out.append(g[0])
            continue
        center = sum(e.center for e in g) / len(g)
        radius = max(abs(e.center - center) + e.radius for e in g)
        out.append(RootEnclosure(center, radius, len(g)))
    out.sort(key=lambda e: (float(abs(e.center)), float(mpmath.arg(e.center))))
    return out


@dataclass
class RStar:
    value: mpmath.mpf
    eps: object
    disk: mpmath.mpf  # x ** (1 - eps)
    limiting_root: Optional[RootEnclosure]
    other_roots: list  # validated roots other than x, by modulus
    spurious: list  # roots of the cleared numerator that are not roots of the series


def _as_mpf(eps):
    return _mpf(eps) if isinstance(eps, (Fraction, int)) else mpmath.mpf(eps)


def radius_R_star(basis, eps, prec: int = DEFAULT_PREC) -> RStar:
    pb = _basis(basis, prec)
    e = _as_mpf(eps)
    if not 0 < e < 1:
        raise ValueError("eps must lie in (0, 1)")
    num, _ = denominator_series(pb)
    roots = certified_roots(num, prec)
    with mpmath.workprec(prec + 20):
        x = pb.base
        disk = x ** (1 - e)
        # the root at x: the enclosure containing the certified base
        at_x = min(roots, key=lambda r: abs(r.center - x))
        if abs(at_x.center - x) > at_x.radius + pb.base_radius + mpmath.mpf(2) ** (-(prec - 10)):
            raise NumericError("no root enclosure contains the base")
        others, spurious = [], []
        for r in roots:
            if r is at_x:
                continue
            z = r.center
            if pb.progressions and abs(z) >= 1 - r.radius:
                # outside the disk of convergence of the series form
                spurious.append(r)
                continue
            val = pb.power_sum(z) - 1
            if abs(val) > mpmath.mpf(2) ** (-(prec // 2)):
                spurious.append(r)
                continue
            others.append(r)
        others.sort(key=lambda r: r.modulus)
        inside = [r for r in others if r.modulus < disk]
        if inside:
            lim = inside[0]
            value = lim.modulus
        else:
            lim = None
            value = disk
        return RStar(+value, eps, +disk, lim, others, spurious)


def rho_bound(basis, eps, prec: int = DEFAULT_PREC) -> tuple:
    """Open interval ``(x / R*, 1)`` of admissible geometric decay rates."""
    pb = _basis(basis, prec)
    rs = radius_R_star(pb, eps, prec)
    with mpmath.workprec(prec + 20):
        lo = pb.base / rs.value
        if lo >= 1:
            raise NumericError("R* does not exceed the base")
        return (+lo, mpmath.mpf(1))


def best_R_star(basis, eps_grid=(Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)), prec: int = DEFAULT_PREC) -> RStar:
    """The largest ``R*`` over a grid of admissible ``eps``."""
    best = None
    for e in eps_grid:
        r = radius_R_star(basis, e, prec)
        if best is None or r.value > best.value:
            best = r
    return best
