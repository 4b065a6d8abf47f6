"""Zeros of ``f(z) = sum_i alpha_i^z - 1`` in the strip left of ``Re z = 1``.

Zeros are counted by the argument principle.  Along each boundary edge
the argument of ``f`` is tracked in steps short enough that ``f`` cannot
reach zero between samples: with ``L`` a bound on ``|f'|`` over the box,
a step of length ``h`` is accepted once ``L*h < |f(start)|``, and then
the argument change over the step is the principal one.  Boxes holding
zeros are bisected and each isolated zero is polished by Newton's method
and enclosed by a winding count around a small square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from ..errors import BoundaryZero, DomainError, NotHigherRank, NumericError
from ..renewal import DEFAULT_PREC, _mpf, rank_report
from ..scheme import Atom, Scheme

# split positions tried in order when a zero sits on a bisection line
_SPLITS = (0.5, 0.4871, 0.5137, 0.4603, 0.5411)
# outward shift applied to a user rectangle whose edge passes through a zero
JITTER = 1e-6


@dataclass(frozen=True)
class Rect:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def __post_init__(self):
        if not (self.re_lo < self.re_hi and self.im_lo < self.im_hi):
            raise ValueError(f"empty rectangle {self}")

    @property
    def width(self):
        return self.re_hi - self.re_lo

    @property
    def height(self):
        return self.im_hi - self.im_lo

    def contains(self, z, pad=0.0):
        return (
            self.re_lo - pad <= float(z.real) <= self.re_hi + pad
            and self.im_lo - pad <= float(z.imag) <= self.im_hi + pad
        )

    def grow(self, d):
        return Rect(self.re_lo - d, self.re_hi + d, self.im_lo - d, self.im_hi + d)


class _F:
    """``f`` and ``f'`` for a scheme, with tails summed in closed form."""

    def __init__(self, scheme: Scheme):
        self.terms = []  # (kind, log a, log r)
        for b in scheme.blocks:
            if isinstance(b, Atom):
                self.terms.append((0, b.length, None))
            else:
                self.terms.append((1, b.first, b.ratio))
        self.has_tail = any(k for k, _, _ in self.terms)
        self._logs = None

    def logs(self):
        # cache per working precision
        key = mpmath.mp.prec
        if self._logs is None or self._logs[0] != key:
            vals = []
            for kind, a, r in self.terms:
                vals.append((kind, mpmath.log(_mpf(a)), None if r is None else mpmath.log(_mpf(r))))
            self._logs = (key, vals)
        return self._logs[1]

    def check(self, z):
        if self.has_tail and mpmath.re(z) <= 0:
            raise DomainError(f"tail series diverges at Re z = {mpmath.nstr(mpmath.re(z), 8)}")

    def value(self, z):
        s = -1
        for kind, la, lr in self.logs():
            t = mpmath.exp(z * la)
            if kind:
                t = t / (1 - mpmath.exp(z * lr))
            s += t
        return s

    def both(self, z):
        s, ds = -1, 0
        for kind, la, lr in self.logs():
            t = mpmath.exp(z * la)
            if kind:
                u = mpmath.exp(z * lr)
                d = 1 - u
                s += t / d
                ds += t * (la * d + lr * u) / d**2
            else:
                s += t
                ds += la * t
        return s, ds

    def lipschitz(self, sigma):
        """Upper bound on ``|f'|`` over ``Re z >= sigma``."""
        sigma = mpmath.mpf(sigma)
        L = mpmath.mpf(0)
        for kind, la, lr in self.logs():
            a_s = mpmath.exp(sigma * la)
            if kind:
                r_s = mpmath.exp(sigma * lr)
                # |a^z/(1-r^z)|' <= a^s |ln a|/(1-r^s) + a^s r^s |ln r|/(1-r^s)^2
                L += a_s * abs(la) / (1 - r_s) + a_s * r_s * abs(lr) / (1 - r_s) ** 2
            else:
                L += a_s * abs(la)
        return L


def f_eval(scheme: Scheme, z, prec: int = DEFAULT_PREC):
    """``sum_i alpha_i^z - 1`` as an mpc.

    Geometric tails are summed in closed form, so the value is exact up to
    the working precision wherever ``Re z > 0``.
    """
    F = _F(scheme)
    with mpmath.workprec(prec):
        z = mpmath.mpc(z)
        F.check(z)
        return +F.value(z)


# -- argument tracking -------------------------------------------------------------


class _Tracker:
    def __init__(self, F: _F, L, h_min):
        self.F = F
        self.L = L
        self.h_min = h_min
        self.cache = {}
        self.evals = 0

    def f(self, z):
        key = (z.real, z.imag)
        v = self.cache.get(key)
        if v is None:
            v = self.F.value(z)
            self.cache[key] = v
            self.evals += 1
        return v

    def segment(self, za, zb):
        """Change of ``arg f`` along the straight segment from za to zb."""
        total = mpmath.mpf(0)
        stack = [(za, zb)]
        while stack:
            a, b = stack.pop()
            fa, fb = self.f(a), self.f(b)
            h = abs(b - a)
            # either endpoint can anchor the disk argument
            if self.L * h < 0.9 * max(abs(fa), abs(fb)):
                total += mpmath.arg(fb / fa)
                continue
            if h < self.h_min:
                raise BoundaryZero(f"f nearly vanishes near {mpmath.nstr(a, 10)}")
            m = (a + b) / 2
            stack.append((m, b))
            stack.append((a, m))
        return total

    def winding(self, rect: Rect):
        c = [
            mpmath.mpc(rect.re_lo, rect.im_lo),
            mpmath.mpc(rect.re_hi, rect.im_lo),
            mpmath.mpc(rect.re_hi, rect.im_hi),
            mpmath.mpc(rect.re_lo, rect.im_hi),
        ]
        total = sum(self.segment(c[i], c[(i + 1) % 4]) for i in range(4))
        w = total / (2 * mpmath.pi)
        n = int(mpmath.nint(w))
        if abs(w - n) > 0.05:
            raise NumericError(f"winding number {mpmath.nstr(w, 6)} is not near an integer")
        return n


@dataclass
class Zero:
    center: mpmath.mpc
    radius: float
    multiplicity: int = 1

    @property
    def re(self):
        return self.center.real

    @property
    def im(self):
        return self.center.imag


@dataclass
class ZeroList:
    rect: Rect
    zeros: list
    count: int  # winding number of the (possibly jittered) rectangle
    jittered: bool = False
    evaluations: int = 0

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)


def find_zeros(
    scheme: Scheme,
    rect: Rect,
    prec: int = DEFAULT_PREC,
    track_prec: int = 64,
    radius: float = 1e-25,
    max_boxes: int = 100_000,
) -> ZeroList:
    """Every zero of ``f`` in ``rect``, with multiplicity and an enclosure.

    ``track_prec`` is the working precision for the argument tracking,
    ``prec`` for Newton refinement; each zero is certified inside a square
    of half-side ``radius`` about the returned center.
    """
    F = _F(scheme)
    if F.has_tail and rect.re_lo <= 0:
        raise DomainError("rectangle must lie in Re z > 0 when the scheme has a tail")
    jittered = False
    with mpmath.workprec(track_prec):
        L = F.lipschitz(max(rect.re_lo - JITTER, 1e-9) if F.has_tail else rect.re_lo - JITTER)
        tr = _Tracker(F, L, h_min=1e-12)
        try:
            total = tr.winding(rect)
        except BoundaryZero:
            rect = rect.grow(JITTER)
            jittered = True
            total = tr.winding(rect)
        pending = [(rect, total)] if total else []
        isolated = []
        boxes = 0
        while pending:
            box, n = pending.pop()
            boxes += 1
            if boxes > max_boxes:
                raise NumericError("box budget exhausted while isolating zeros")
            if n == 1 or max(box.width, box.height) < 1e-9:
                isolated.append((box, n))
                continue
            halves = _split(tr, box)
            for sub, k in halves:
                if k:
                    pending.append((sub, k))
            if sum(k for _, k in halves) != n:
                raise NumericError("winding numbers of sub-boxes do not add up")
        tr.prec = track_prec
    zeros = [_refine(F, tr, box, n, prec, radius) for box, n in isolated]
    zeros.sort(key=lambda z: (float(z.im), float(z.re)))
    return ZeroList(rect, zeros, total, jittered, tr.evals)


def _split(tr: _Tracker, box: Rect):
    for frac in _SPLITS:
        try:
            if box.width >= box.height:
                x = box.re_lo + frac * box.width
                parts = [Rect(box.re_lo, x, box.im_lo, box.im_hi), Rect(x, box.re_hi, box.im_lo, box.im_hi)]
            else:
                y = box.im_lo + frac * box.height
                parts = [Rect(box.re_lo, box.re_hi, box.im_lo, y), Rect(box.re_lo, box.re_hi, y, box.im_hi)]
            return [(p, tr.winding(p)) for p in parts]
        except BoundaryZero:
            continue
    raise BoundaryZero(f"no clean split found for {box}")


def _newton(F: _F, box: Rect, prec: int):
    """Newton from the box center; None if an iterate leaves the box."""
    z = mpmath.mpc((box.re_lo + box.re_hi) / 2, (box.im_lo + box.im_hi) / 2)
    pad = 0.25 * max(box.width, box.height)
    for _ in range(100):
        v, dv = F.both(z)
        if dv == 0:
            return None
        step = v / dv
        z = z - step
        if not box.contains(z, pad=pad):
            return None
        if abs(step) < mpmath.mpf(2) ** (-prec):
            return z if box.contains(z, pad=1e-12) else None
    return None


def _refine(F: _F, tr: _Tracker, box: Rect, n: int, prec: int, radius: float) -> Zero:
    if n != 1:
        z0 = mpmath.mpc((box.re_lo + box.re_hi) / 2, (box.im_lo + box.im_hi) / 2)
        return Zero(z0, max(box.width, box.height), n)
    while True:
        with mpmath.workprec(prec + 20):
            z = _newton(F, box, prec)
        if z is not None:
            break
        if max(box.width, box.height) < 1e-10:
            raise NumericError(f"Newton does not converge in {box}")
        # shrink to the half that keeps the zero
        with mpmath.workprec(tr.prec):
            box = next(b for b, k in _split(tr, box) if k == 1)
    with mpmath.workprec(prec + 20):
        if _winding_mp(F, z, mpmath.mpf(radius)) != 1:
            raise NumericError(f"refined zero at {mpmath.nstr(z, 15)} failed its enclosure check")
        return Zero(+z, radius, 1)


def _winding_mp(F: _F, z, r):
    """Winding count around the square of half-side ``r`` centered at ``z``."""
    corners = [z + r * mpmath.mpc(a, b) for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    tr = _Tracker(F, F.lipschitz(z.real - r), r * mpmath.mpf(10) ** -6)
    total = sum(tr.segment(corners[i], corners[(i + 1) % 4]) for i in range(4))
    w = total / (2 * mpmath.pi)
    n = int(mpmath.nint(w))
    if abs(w - n) > 0.05:
        raise NumericError("enclosure winding is not near an integer")
    return n


# -- zero-free region check ----------------------------------------------------


@dataclass
class RegionCheck:
    r: object
    beta: object
    v_min: float
    fitted_C: float  # +inf when no zero lies beyond v_min
    witness: Optional[Zero]
    considered: int
    violations: list = field(default_factory=list)  # zeros with Re >= 1 other than z = 1

    @property
    def ok(self):
        return not self.violations and self.fitted_C > 0


def zero_region_check(scheme: Scheme, zeros, r, beta=None) -> RegionCheck:
    """Fit ``C = min u |v|^(2+2r)`` over zeros ``1 - u + iv`` with ``|v|`` large.

    The bound ``u >= C |v|^-(2+2r)`` is expected beyond
    ``|v| > 2 pi / ln(1/beta)``; ``beta`` defaults to the smallest ratio.
    """
    rep = rank_report(scheme)
    if rep.is_rank_one:
        raise NotHigherRank("rank-one schemes have zeros on Re z = 1")
    if beta is None:
        beta = min(scheme.alphas_at_least(Fraction(0)) if scheme.is_finite else _block_alphas(scheme))
    v_min = 2 * math.pi / math.log(1 / float(beta))
    expo = 2 + 2 * float(r)
    best, witness, k, bad = None, None, 0, []
    for z in zeros:
        u = 1 - float(z.re)
        v = abs(float(z.im))
        if u <= 1e-12:
            if v > 1e-9:
                bad.append(z)
            continue
        if v <= v_min:
            continue
        k += 1
        c = u * v**expo
        if best is None or c < best:
            best, witness = c, z
    return RegionCheck(r, beta, v_min, math.inf if best is None else best, witness, k, bad)


def _block_alphas(scheme):
    out = []
    for b in scheme.blocks:
        out.append(b.length if isinstance(b, Atom) else b.first)
    return out


# -- export ------------------------------------------------------------------------


def zeros_rows(zl: ZeroList, digits: int = 30):
    for z in zl.zeros:
        yield {
            "re": mpmath.nstr(z.re, digits),
            "im": mpmath.nstr(z.im, digits),
            "rad": f"{z.radius:.3e}",
            "multiplicity": z.multiplicity,
        }


def zeros_csv(zl: ZeroList, digits: int = 30) -> str:
    lines = ["re,im,rad,multiplicity"]
    for row in zeros_rows(zl, digits):
        lines.append(f"{row['re']},{row['im']},{row['rad']},{row['multiplicity']}")
    return "\n".join(lines) + "\n"


def zeros_json(zl: ZeroList, digits: int = 30) -> dict:
    return {
        "rect": [zl.rect.re_lo, zl.rect.re_hi, zl.rect.im_lo, zl.rect.im_hi],
        "count": zl.count,
        "jittered": zl.jittered,
        "zeros": list(zeros_rows(zl, digits)),
    }
