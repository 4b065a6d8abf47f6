import math
from fractions import Fraction

import mpmath
import pytest

from kakutani import scheme as sch
from kakutani.enumeration import count_A, lattice_counts
from kakutani.renewal import (
    INFINITE,
    LATTICE_NOTE,
    SYMBOLIC,
    entropy,
    eps_summability,
    integer_rank,
    lattice_sequence,
    log_grid,
    loglog_slope,
    predicted_limit,
    rank_report,
    renewal_error_slope,
    renewal_sequence,
    report_fragment,
)
from kakutani.errors import NotRankOne

F = Fraction
LN2, LN3 = math.log(2), math.log(3)


def test_entropy_closed_forms():
    assert float(entropy(sch.bundled("sixths"))) == pytest.approx(LN2 / 2 + LN3 / 3 + math.log(6) / 6, rel=1e-15)
    # tail lengths 3^-(k+1): sum (k+1) 3^-(k+1) = 3/4
    assert float(entropy(sch.bundled("fig3"))) == pytest.approx(LN2 / 2 + 0.75 * LN3, rel=1e-15)
    assert float(entropy(sch.bundled("binary-tail"))) == pytest.approx(2 * LN2, rel=1e-15)


def test_entropy_tail_against_partial_sums():
    s = sch.bundled("rank-three")
    with mpmath.workprec(120):
        h = -(mpmath.mpf(1) / 2) * mpmath.log(mpmath.mpf(1) / 2) - (mpmath.mpf(1) / 3) * mpmath.log(mpmath.mpf(1) / 3)
        h += mpmath.nsum(lambda k: -(mpmath.mpf(7) ** -(k + 1)) * mpmath.log(mpmath.mpf(7) ** -(k + 1)), [0, mpmath.inf])
        assert abs(entropy(s, 100).value - h) < mpmath.mpf(10) ** -28


@pytest.mark.parametrize(
    "name,rank,base",
    [
        ("dyadic", 1, F(1, 2)),
        ("eighths", 1, F(1, 2)),
        ("binary-tail", 1, F(1, 2)),
        ("binary-tail-desc", 1, F(1, 2)),
        ("third", 2, None),
        ("fig2", 2, None),
        ("fig3", 2, None),
        ("sixths", 2, None),
        ("rank-three", 3, None),
    ],
)
def test_rank(name, rank, base):
    rep = rank_report(sch.bundled(name))
    assert rep.rank == rank
    assert rep.minimal_base == base


def test_rank_one_with_non_trivial_base():
    # three quarters and four sixteenths: base 1/4, not 1/2
    s = sch.build_scheme([sch.Atom(F(1, 4))] * 3 + [sch.Atom(F(1, 16))] * 4)
    rep = rank_report(s)
    assert rep.minimal_base == F(1, 4)
    assert sorted(rep.exponents.values()) == [1, 1, 1, 2, 2, 2, 2]


def test_integer_rank():
    assert integer_rank([[2, 0], [4, 0]]) == 1
    assert integer_rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2
    assert integer_rank([[0, 0]]) == 0


def test_eighths_exponents():
    rep = rank_report(sch.bundled("eighths"))
    assert sorted(rep.exponents.values()) == [1, 2, 3, 3]


def test_lattice_constant_dyadic_and_tail():
    assert float(predicted_limit(sch.bundled("dyadic")).constant) == pytest.approx(2, rel=1e-15)
    assert float(predicted_limit(sch.bundled("binary-tail")).constant) == pytest.approx(1, rel=1e-15)
    lim = predicted_limit(sch.bundled("sixths"))
    assert lim.mode == "non-lattice"
    assert lim.constant == lim.renewal_density


def test_lattice_constant_matches_counts():
    rep = rank_report(sch.bundled("eighths"))
    c = lattice_sequence(rep, 200)
    got = Fraction(c[200], 2**200)
    assert float(got) == pytest.approx(float(predicted_limit(sch.bundled("eighths")).constant), rel=1e-12)


def test_lattice_sequence_rank_error():
    with pytest.raises(NotRankOne):
        lattice_sequence(rank_report(sch.bundled("sixths")), 5)


def test_eps_summability():
    v = eps_summability(sch.bundled("fig3"), F(1, 2))
    want = math.sqrt(0.5) + (1 / math.sqrt(3)) / (1 - 1 / math.sqrt(3))
    assert float(v) == pytest.approx(want, rel=1e-14)
    with pytest.raises(ValueError):
        eps_summability(sch.bundled("fig3"), 1)


def test_symbolic_families():
    z = SYMBOLIC["zeta"]
    with mpmath.workprec(100):
        s = z.s(80)
        assert abs(mpmath.zeta(s) - 2) < mpmath.mpf(10) ** -20
    # t = s (1 - eps) <= 1 diverges
    assert z.eps_summability(0.5) == INFINITE
    cc = SYMBOLIC["cantor-complement"]
    t = 0.9
    assert float(cc.eps_summability(0.1)) == pytest.approx(3**-t / (1 - 2 * 3**-t), rel=1e-13)
    assert cc.eps_summability(0.5) == INFINITE
    # 2^k intervals of length 3^-(k+1): H = sum 2^k 3^-(k+1) (k+1) ln 3 = 3 ln 3
    assert float(cc.entropy()) == pytest.approx(3 * LN3, rel=1e-14)


def test_renewal_sequence_and_grid():
    g = log_grid(4, 1, 3)
    assert g[0] == F(1, 10) and g[-1] == F(1, 1000)
    assert all(b < a for a, b in zip(g, g[1:]))
    seq = renewal_sequence(sch.bundled("dyadic"), [F(1, 8), F(1, 16)])
    assert seq == [(F(1, 8), 15, F(15, 8)), (F(1, 16), 31, F(31, 16))]


def test_loglog_slope_of_power_law():
    lams = [10.0**-k for k in range(1, 8)]
    slope, se = loglog_slope(lams, [3 * l**0.4 for l in lams])
    assert slope == pytest.approx(0.4, abs=1e-12)


def test_renewal_error_slope_dyadic():
    # error is exactly 2^-n, slope one
    exp = renewal_error_slope(sch.bundled("dyadic"))
    assert exp.slope == pytest.approx(1.0, abs=1e-9)


def test_report_carries_lattice_note():
    doc = report_fragment(sch.bundled("dyadic"))
    assert doc["limit"]["note"] == LATTICE_NOTE
    assert doc["limit"]["constant"].startswith("2.000000")
    assert doc["minimal_base"] == "1/2"
    assert "note" not in report_fragment(sch.bundled("sixths"))["limit"]


def test_tail_lattice_counts():
    t = sch.bundled("binary-tail")
    assert lattice_counts([], [(1, 1)], 20) == [2**n for n in range(21)]
    assert all(count_A(t, F(1, 2**n)) == 2**n for n in range(12))


def test_rank_invariant_under_permutation_and_duplication():
    a = rank_report(sch.parse_inline("1/2,1/3,1/6"))
    b = rank_report(sch.parse_inline("1/6,1/2,1/3"))
    assert a.rank == b.rank == 2
    c = rank_report(sch.parse_inline("1/4,1/2,1/8,1/8"))
    assert c.minimal_base == F(1, 2) and sorted(c.exponents.values()) == [1, 2, 3, 3]


@pytest.mark.parametrize("name", ["dyadic", "eighths", "binary-tail", "binary-tail-desc"])
def test_base_powers_are_exact(name):
    s = sch.bundled(name)
    rep = rank_report(s)
    x = rep.minimal_base
    for sym, n in rep.exponents.items():
        assert x**n == s.alpha(sym)
    for i, (p, q) in rep.progressions.items():
        b = s.blocks[i]
        assert x**p == b.first and x**q == b.ratio


@pytest.mark.parametrize("name", ["dyadic", "eighths", "binary-tail", "binary-tail-desc"])
def test_lattice_convergence_is_geometric(name):
    # x^k |A(x^k)| approaches the constant from below with error at most x^k;
    # for eighths the error carries a period-3 factor from the unit-circle roots
    s = sch.bundled(name)
    rep = rank_report(s)
    x = rep.minimal_base
    c = float(predicted_limit(s).constant)
    counts = lattice_sequence(rep, 60)
    v = [F(counts[k]) * x**k for k in range(61)]
    assert all(b >= a for a, b in zip(v, v[1:]))
    assert all(abs(float(v[k]) - c) <= float(x**k) * (1 + 1e-9) for k in range(61))
