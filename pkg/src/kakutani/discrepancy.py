"""Exact discrepancy of endpoint sets and fits of its decay.

All discrepancies are exact rationals.  The fast path uses the sorted-point
closed forms; :func:`discrepancy_oracle` enumerates every interval with
endpoints among the points and {0, 1} and serves as its independent check.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .enumeration import DEFAULT_MAX_POINTS, PointSet, count_A, iter_ladder, point_set
from .errors import BudgetExceeded, DegenerateData, EmptyPointSet
from .renewal import log_grid, rank_report
from .scheme import Scheme, as_fraction, fraction_str

# transient grid points dropped before fitting
FIT_SKIP = 3


@dataclass(frozen=True)
class DiscrepancyValue:
    lam: Fraction
    extreme: Fraction
    star: Fraction
    n_points: int


def _nonempty(points: PointSet):
    if len(points) == 0:
        raise EmptyPointSet("point set is empty")


def mu_measure(points: PointSet, a, b) -> Fraction:
    """Share of the points lying in ``[a, b)``."""
    _nonempty(points)
    a, b = as_fraction(a), as_fraction(b)
    if not 0 <= a < b <= 1:
        raise ValueError("need 0 <= a < b <= 1")
    return Fraction(points.count_in(a, b), len(points))


def _value(points: PointSet, triple) -> DiscrepancyValue:
    ext, star, scale = triple
    return DiscrepancyValue(points.lam, Fraction(ext, scale), Fraction(star, scale), len(points))


def extreme_discrepancy(points: PointSet, backend: Optional[str] = None) -> DiscrepancyValue:
    """Extreme and star discrepancy from the sorted-point formulas, in O(N)."""
    _nonempty(points)
    return _value(points, kernels.discrepancy_fast(points.nums, points.denom, backend=backend))


def discrepancy_oracle(points: PointSet, backend: Optional[str] = None) -> DiscrepancyValue:
    """Same values by scoring every candidate interval; O(N^2)."""
    _nonempty(points)
    return _value(points, kernels.discrepancy_bruteforce(points.nums, points.denom, backend=backend))


# -- grids ---------------------------------------------------------------------


def geometric_grid(base, first: int, last: int) -> list:
    base = as_fraction(base)
    return [base**n for n in range(first, last + 1)]


def ladder_grid(scheme: Scheme, first: int, last: int) -> list:
    out = []
    for n, lam in enumerate(iter_ladder(scheme)):
        if n > last:
            break
        if n >= first:
            out.append(lam)
    return out


def decade_grid(per_decade: int, first: int, last: int) -> list:
    return log_grid(per_decade, first, last)


def check_grid(grid) -> list:
    grid = [as_fraction(g) for g in grid]
    if not grid:
        raise ValueError("grid is empty")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly decreasing")
    if any(g <= 0 for g in grid):
        raise ValueError("grid values must be positive")
    return grid


def discrepancy_curve(
    scheme: Scheme,
    grid,
    threads: int = 1,
    max_points: Optional[int] = DEFAULT_MAX_POINTS,
    backend: Optional[str] = None,
) -> list:
    """Discrepancy of ``X(lam)`` for each ``lam`` in the grid, in grid order."""
    grid = check_grid(grid)
    if max_points is not None:
        memo = {}
        for lam in grid:
            if count_A(scheme, lam, memo=memo) > max_points:
                raise BudgetExceeded("point generation", max_points)

    def one(lam):
        return extreme_discrepancy(point_set(scheme, lam, max_points, backend), backend)

    if threads <= 1:
        return [one(lam) for lam in grid]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, grid))


# -- decay fits ----------------------------------------------------------------

GEOMETRIC = "geometric"
LOGPOWER = "logpower"


@dataclass
class DecayFit:
    model: str
    param: float  # rho_hat or P_hat
    stderr: float
    residual: float  # RMS residual on the log scale
    grid: list  # (t, value) pairs actually fitted
    skipped: int = 0
    intercept: float = 0.0

    @property
    def rho_hat(self):
        return self.param if self.model == GEOMETRIC else None

    @property
    def P_hat(self):
        return self.param if self.model == LOGPOWER else None


def fit_decay(curve, model: str, skip: int = FIT_SKIP) -> DecayFit:
    """Least-squares decay fit on a log scale.

    ``curve`` is a list of ``(t, D)``.  For ``geometric`` ``t`` is the step
    ``n`` and ``ln D`` is regressed on ``n`` (``rho_hat = e^slope``).  For
    ``logpower`` ``t`` is ``lam`` and ``ln D`` is regressed on
    ``ln(-ln lam)`` (``P_hat = -slope``).  The first ``skip`` points are
    dropped as transient.
    """
    if model not in (GEOMETRIC, LOGPOWER):
        raise ValueError(f"unknown model {model!r}")
    pts = list(curve)
    if len(pts) < 5:
        raise DegenerateData("need at least 5 curve points")
    pts = pts[skip:]
    if len(pts) < 2:
        raise DegenerateData("nothing left to fit after the transient window")
    vals = [float(v) for _, v in pts]
    if not all(math.isfinite(v) and v > 0 for v in vals):
        raise DegenerateData("curve values must be positive and finite")
    y = np.log(vals)
    if model == GEOMETRIC:
        x = np.array([float(t) for t, _ in pts])
    else:
        lams = [float(t) for t, _ in pts]
        if not all(0 < l < 1 for l in lams):
            raise DegenerateData("log-power fit needs 0 < lam < 1")
        x = np.log(-np.log(lams))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (slope * x + icpt)
    rms = float(math.sqrt(np.mean(res**2)))
    dof = len(x) - 2
    if dof > 0:
        s2 = float(np.sum(res**2)) / dof
        se = math.sqrt(s2 / float(np.sum((x - x.mean()) ** 2)))
    else:
        se = 0.0
    if model == GEOMETRIC:
        return DecayFit(model, math.exp(slope), math.exp(slope) * se, rms, pts, skip, float(icpt))
    return DecayFit(model, -float(slope), se, rms, pts, skip, float(icpt))


# -- joint check -----------------------------------------------------------------

RHO_TOL = 0.05
UPPER_BOUND_CAVEAT = (
    "The predicted exponent bounds the decay from one side only: the observed "
    "discrepancy may decay faster than (-log lam)^(-P*), so P_hat above P* is "
    "not a contradiction."
)


@dataclass
class TheoremReport:
    rank: int
    mode: str  # "geometric" for rank one, "logpower" otherwise
    fit: DecayFit
    curve: list
    rho_interval: Optional[tuple] = None
    r_hat: Optional[float] = None
    P_star: Optional[float] = None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return all(self.checks.values())


def _budget_levels(scheme, candidates, max_points):
    """The prefix of a decreasing grid whose point counts fit the budget."""
    memo = {}
    out = []
    for lam in candidates:
        if count_A(scheme, lam, memo=memo) > max_points:
            break
        out.append(lam)
    return out


def theorem_check(
    scheme: Scheme,
    eps_grid=(Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)),
    max_points: int = 200_000,
    threads: int = 1,
    backend: Optional[str] = None,
) -> TheoremReport:
    """Dispatch on rank: geometric decay for rank one, log-power otherwise."""
    from .spectral import PowerBasis, best_R_star, estimate_bad_approx_r, predicted_P_star

    rep = rank_report(scheme)
    if rep.is_rank_one:
        x = rep.minimal_base
        lams = _budget_levels(scheme, (x**n for n in range(1, 10_000)), max_points)
        curve = discrepancy_curve(scheme, lams, threads, max_points, backend)
        pts = [(n, v.extreme) for n, v in enumerate(curve, start=1)]
        fit = fit_decay(pts, GEOMETRIC)
        rs = best_R_star(PowerBasis.from_scheme(scheme), eps_grid)
        lo = float(x) / float(rs.value)
        rep_ = TheoremReport(rep.rank, GEOMETRIC, fit, curve, rho_interval=(lo, 1.0))
        rep_.checks["rho_hat < 1"] = fit.param < 1
        rep_.checks["rho_hat <= sup + tol"] = fit.param <= 1.0 + RHO_TOL
        rep_.notes.append(f"R* = {float(rs.value):.12g} at eps = {fraction_str(as_fraction(rs.eps))}")
        return rep_
    lams = _budget_levels(scheme, decade_grid(4, 1, 60), max_points)
    curve = discrepancy_curve(scheme, lams, threads, max_points, backend)
    fit = fit_decay([(v.lam, v.extreme) for v in curve], LOGPOWER)
    est = estimate_bad_approx_r(scheme)
    P_star = float(predicted_P_star(est.r_hat)) if est.r_hat < 0.5 else None
    rep_ = TheoremReport(rep.rank, LOGPOWER, fit, curve, r_hat=est.r_hat, P_star=P_star)
    rep_.checks["P_hat > 0"] = fit.param > 0
    rep_.notes.append(UPPER_BOUND_CAVEAT)
    rep_.notes.append(
        f"r_hat from ln {fraction_str(est.pair[0])} / ln {fraction_str(est.pair[1])}, "
        f"convergents certified up to q = {est.certified_up_to}"
    )
    return rep_


# -- export --------------------------------------------------------------------

CURVE_COLUMNS = ("lambda_exact", "lambda_float", "n_points", "extreme_exact", "extreme_float", "star_float")


def curve_csv(curve) -> str:
    lines = [",".join(CURVE_COLUMNS)]
    for v in curve:
        lines.append(
            ",".join(
                (
                    fraction_str(v.lam),
                    f"{float(v.lam):.17g}",
                    str(v.n_points),
                    fraction_str(v.extreme),
                    f"{float(v.extreme):.17g}",
                    f"{float(v.star):.17g}",
                )
            )
        )
    return "\n".join(lines) + "\n"


def fit_json(fit: DecayFit) -> dict:
    key = "rho_hat" if fit.model == GEOMETRIC else "P_hat"
    return {
        "model": fit.model,
        key: f"{fit.param:.17g}",
        "stderr": f"{fit.stderr:.6g}",
        "residual": f"{fit.residual:.6g}",
        "skipped": fit.skipped,
        "points": len(fit.grid),
    }
