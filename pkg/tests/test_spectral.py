import math
from fractions import Fraction

import mpmath
import pytest

from kakutani import scheme as sch
from kakutani.enumeration import count_A
from kakutani.errors import DomainError, NotHigherRank, NotRankOne, PrecisionExhausted, RationalInput
from kakutani.spectral import (
    PowerBasis,
    Rect,
    best_R_star,
    certified_roots,
    continued_fraction,
    denominator_series,
    estimate_bad_approx_r,
    f_eval,
    find_zeros,
    golden_basis,
    golden_ratio,
    log_ratio,
    predicted_P_star,
    radius_R_star,
    rho_bound,
    taylor_g,
    zero_region_check,
    zeros_csv,
    zeros_json,
)

F = Fraction


def _b_from_counts(s, x, n):
    prev = count_A(s, x ** (n - 1)) if n else 0
    return prev - x * count_A(s, x**n)


@pytest.mark.parametrize("name", ["dyadic", "eighths", "binary-tail", "binary-tail-desc"])
def test_taylor_matches_counts(name):
    s = sch.bundled(name)
    b = taylor_g(s, 30)
    assert b == [_b_from_counts(s, F(1, 2), n) for n in range(31)]


def test_taylor_special_values():
    assert taylor_g(sch.bundled("dyadic"), 50) == [F(-1, 2)] * 51
    t = taylor_g(sch.bundled("binary-tail"), 50)
    assert t[0] == F(-1, 2) and all(v == 0 for v in t[1:])


def test_denominator_series():
    assert denominator_series(sch.bundled("eighths")) == ([-1, 1, 1, 2], [1])
    # tail 2^-(k+1): z/(1-z) - 1 = (2z - 1)/(1 - z)
    assert denominator_series(sch.bundled("binary-tail")) == ([-1, 2], [1, -1])


def test_not_rank_one():
    with pytest.raises(NotRankOne):
        PowerBasis.from_scheme(sch.bundled("sixths"))


def test_certified_roots_known_polynomial():
    # (2z - 1)(z^2 + z + 1)
    roots = certified_roots([-1, 1, 1, 2], 200)
    assert len(roots) == 3
    with mpmath.workprec(200):
        want = [mpmath.mpf(1) / 2, mpmath.exp(2j * mpmath.pi / 3), mpmath.exp(-2j * mpmath.pi / 3)]
        for w in want:
            r = min(roots, key=lambda e: abs(e.center - w))
            assert abs(r.center - w) <= r.radius + mpmath.mpf(10) ** -50
            assert r.radius < mpmath.mpf(10) ** -40


def test_double_root_is_merged():
    roots = certified_roots([1, -2, 1], 120)  # (z - 1)^2
    assert len(roots) == 1 and roots[0].multiplicity == 2


def test_R_star_eighths():
    rs = radius_R_star(sch.bundled("eighths"), F(1, 4))
    with mpmath.workprec(200):
        assert abs(rs.value - mpmath.mpf(2) ** mpmath.mpf(-0.75)) < mpmath.mpf(10) ** -40
        for r in rs.other_roots:
            assert abs(abs(r.center) - 1) < mpmath.mpf(10) ** -40
            assert 2 * r.radius < mpmath.mpf(10) ** -20
    lo, hi = rho_bound(sch.bundled("eighths"), F(1, 4))
    assert float(lo) == pytest.approx(0.5 / 2**-0.75)


def test_golden_basis():
    pb = golden_basis()
    with mpmath.workprec(200):
        assert abs(pb.base - (mpmath.sqrt(5) - 1) / 2) < mpmath.mpf(10) ** -50
    rs = best_R_star(pb)
    assert float(rs.value) > float(pb.base)


def test_R_star_tail_ignores_spurious_roots():
    rs = radius_R_star(sch.bundled("binary-tail"), F(1, 2))
    assert all(abs(r.center) < 1 for r in rs.other_roots)


# -- zeros -------------------------------------------------------------------------


def _argument_count(alphas, rect):
    """Zero count of sum a^z - 1 by numerical contour integration of f'/f."""
    with mpmath.workprec(80):
        als = [(mpmath.mpf(a.numerator) / a.denominator) for a in alphas]
        lns = [mpmath.log(a) for a in als]

        def g(z):
            terms = [mpmath.exp(z * l) for l in lns]
            return sum(t * l for t, l in zip(terms, lns)) / (sum(terms) - 1)

        corners = [
            mpmath.mpc(rect.re_lo, rect.im_lo),
            mpmath.mpc(rect.re_hi, rect.im_lo),
            mpmath.mpc(rect.re_hi, rect.im_hi),
            mpmath.mpc(rect.re_lo, rect.im_hi),
        ]
        total = mpmath.mpc(0)
        for a, b in zip(corners, corners[1:] + corners[:1]):
            total += mpmath.quad(lambda t: g(a + (b - a) * t) * (b - a), mpmath.linspace(0, 1, 41))
        return total / (2j * mpmath.pi)


def test_dyadic_lattice_zero():
    zl = find_zeros(sch.bundled("dyadic"), Rect(0.5, 1.5, 5, 12))
    assert len(zl) == 1
    want = complex(1, 2 * math.pi / math.log(2))
    assert abs(complex(zl.zeros[0].center) - want) < 1e-12


def test_sixths_zeros_against_contour_integral():
    s = sch.bundled("sixths")
    rect = Rect(0.8, 1.0, 1, 60)
    zl = find_zeros(s, rect)
    n = _argument_count([F(1, 2), F(1, 3), F(1, 6)], rect)
    assert abs(n.imag) < 1e-6
    assert round(n.real) == zl.count == sum(z.multiplicity for z in zl.zeros)
    with mpmath.workprec(200):
        for z in zl.zeros:
            assert abs(f_eval(s, z.center)) < mpmath.mpf(10) ** -40
            assert z.re < 1
            # an independent root finder lands on the same point
            alt = mpmath.findroot(lambda w: f_eval(s, w), mpmath.mpc(z.center) + mpmath.mpc(1e-6, 1e-6))
            assert abs(alt - z.center) < 1e-30


def test_conjugate_zeros():
    s = sch.bundled("fig2")
    up = find_zeros(s, Rect(0.5, 1.0, 1, 30))
    down = find_zeros(s, Rect(0.5, 1.0, -30, -1))
    assert len(up) == len(down)
    for a, b in zip(sorted(up.zeros, key=lambda z: float(z.im)), sorted(down.zeros, key=lambda z: -float(z.im))):
        assert abs(complex(a.center) - complex(b.center).conjugate()) < 1e-20


def test_boundary_zero_is_jittered():
    # the dyadic zero 1 + 2 pi i / ln 2 lies on Re z = 1
    zl = find_zeros(sch.bundled("dyadic"), Rect(0.5, 1.0, 5, 12))
    assert zl.jittered and len(zl) == 1


def test_tail_domain():
    with pytest.raises(DomainError):
        find_zeros(sch.bundled("fig3"), Rect(-0.5, 1.0, 1, 10))


def test_region_check():
    s = sch.bundled("sixths")
    zl = find_zeros(s, Rect(0.8, 1.0, 1, 60))
    rc = zero_region_check(s, zl.zeros, 0.42)
    assert rc.ok and rc.fitted_C > 0 and rc.considered == len(zl)
    assert zero_region_check(s, [], 0.42).fitted_C == math.inf
    with pytest.raises(NotHigherRank):
        zero_region_check(sch.bundled("dyadic"), [], 0.1)


def test_zero_exports():
    zl = find_zeros(sch.bundled("dyadic"), Rect(0.5, 1.5, 5, 12))
    assert zeros_csv(zl).splitlines()[0] == "re,im,rad,multiplicity"
    doc = zeros_json(zl)
    assert doc["zeros"][0]["multiplicity"] == 1


# -- continued fractions -------------------------------------------------------------


def _cf_plain(x, n):
    out = []
    for _ in range(n):
        a = int(mpmath.floor(x))
        out.append(a)
        x = 1 / (x - a)
    return out


def test_ln2_ln3_against_high_precision_floats():
    cf = continued_fraction(log_ratio(2, 3), max_terms=60)
    with mpmath.workdps(400):
        want = _cf_plain(mpmath.log(2) / mpmath.log(3), 60)
    assert cf.quotients == want
    assert cf.quotients[:9] == [0, 1, 1, 1, 2, 2, 3, 1, 5]


def test_golden_all_ones():
    cf = continued_fraction(golden_ratio, max_terms=50)
    assert cf.quotients == [1] * 50
    assert cf.convergents[-1][1] == int(mpmath.fib(50))


def test_rational_inputs():
    with pytest.raises(RationalInput) as e:
        continued_fraction(F(3, 7))
    assert e.value.quotients == [0, 2, 3]
    with pytest.raises(RationalInput) as e:
        estimate_bad_approx_r(sch.bundled("eighths"), pair=(F(1, 2), F(1, 4)))
    assert e.value.quotients == [0, 2]


def test_precision_exhausted():
    with pytest.raises(PrecisionExhausted) as e:
        continued_fraction(log_ratio(2, 3), max_terms=200, prec=64, max_prec=128)
    assert e.value.certified[:5] == [0, 1, 1, 1, 2]


def test_max_denominator_stop():
    cf = continued_fraction(log_ratio(2, 3), max_terms=100, max_denominator=1000)
    assert cf.stop == "max_denominator"
    assert cf.convergents[-1][1] <= 1000


def test_bad_approx_estimate():
    est = estimate_bad_approx_r(sch.bundled("sixths"))
    assert 0 <= est.r_hat < 0.5
    assert est.certified_up_to <= 10**9
    with pytest.raises(DomainError):
        estimate_bad_approx_r(sch.bundled("dyadic"))


def test_predicted_P_star():
    assert predicted_P_star(F(0)) == F(1, 8)
    assert predicted_P_star(F(1, 4)) == F(1, 20)
    with pytest.raises(DomainError):
        predicted_P_star(F(1, 2))
