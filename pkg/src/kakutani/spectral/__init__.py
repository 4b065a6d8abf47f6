"""Generating functions, zeros of the Mellin symbol, and Diophantine data."""

from .diophantine import (
    ApproxEstimate,
    ContinuedFraction,
    continued_fraction,
    estimate_bad_approx_r,
    golden_ratio,
    log_ratio,
    predicted_P_star,
)
from .series import (
    PowerBasis,
    RootEnclosure,
    RStar,
    best_R_star,
    certified_roots,
    denominator_series,
    golden_basis,
    radius_R_star,
    rho_bound,
    taylor_g,
)
from .zeros import Rect, RegionCheck, Zero, ZeroList, f_eval, find_zeros, zero_region_check, zeros_csv, zeros_json

__all__ = [
    "ApproxEstimate",
    "ContinuedFraction",
    "PowerBasis",
    "RStar",
    "Rect",
    "RegionCheck",
    "RootEnclosure",
    "Zero",
    "ZeroList",
    "best_R_star",
    "certified_roots",
    "continued_fraction",
    "denominator_series",
    "estimate_bad_approx_r",
    "f_eval",
    "find_zeros",
    "golden_basis",
    "golden_ratio",
    "log_ratio",
    "predicted_P_star",
    "radius_R_star",
    "rho_bound",
    "taylor_g",
    "zero_region_check",
    "zeros_csv",
    "zeros_json",
]
