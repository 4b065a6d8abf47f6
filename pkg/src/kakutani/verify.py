"""Invariant batteries run by ``kakutani verify``.

Each check pairs an implementation with an independent route to the same
value and reports a :class:`CheckResult`.  Budget errors are not swallowed:
they propagate so the command exits with the budget code.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import scheme as sch
from .discrepancy import discrepancy_oracle, extreme_discrepancy
from .enumeration import (
    count_A,
    enumerate_A,
    iter_ladder,
    lattice_counts,
    make_pointset,
    point_set,
    point_set_by_words,
)
from .errors import BudgetExceeded, MassNotOne
from .renewal import entropy, rank_report
from .scheme import Scheme, word_alpha, word_left_endpoint
from .spectral import continued_fraction, f_eval, log_ratio, taylor_g

DEFAULT_SCHEMES = ("dyadic", "third", "fig2", "fig3", "eighths", "sixths", "binary-tail", "binary-tail-desc", "rank-three")


@dataclass
class CheckResult:
    module: str
    name: str
    instance: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{tag}  {self.module:<12} {self.name:<28} {self.instance}{extra}"


def _lams(scheme: Scheme, budget: int):
    """A few rational thresholds whose word counts stay within ``budget``."""
    out = []
    for lam in (Fraction(1, 3), Fraction(1, 10), Fraction(2, 77), Fraction(1, 200), Fraction(1, 1000)):
        if count_A(scheme, lam) <= budget:
            out.append(lam)
    if not out:
        raise BudgetExceeded("verification point sets", budget)
    return out


def check_scheme(name: str, scheme: Scheme, budget: int, rng: random.Random):
    res = []
    again = sch.loads(sch.dumps(scheme))
    res.append(CheckResult("scheme", "config round-trip", name, again == scheme))
    lams = _lams(scheme, budget)

    for lam in lams:
        inst = f"{name} lam={sch.fraction_str(lam)}"
        words = list(enumerate_A(scheme, lam, cap=budget))
        c = count_A(scheme, lam)
        res.append(CheckResult("enumerate", "count = enumeration", inst, c == len(words), f"{c} vs {len(words)}"))
        fast = point_set(scheme, lam, max_points=budget)
        ref = point_set_by_words(scheme, lam, cap=budget)
        res.append(CheckResult("enumerate", "grid = rational endpoints", inst, fast.points == ref.points))
        if scheme.zero_symbol is not None:
            a1 = scheme.alpha(scheme.zero_symbol)
            want = c - count_A(scheme, lam / a1)
            res.append(CheckResult("enumerate", "|X| = |A| - |A(lam/a1)|", inst, len(fast) == want))
        if len(fast) <= 4096:
            d1, d2 = extreme_discrepancy(fast), discrepancy_oracle(fast)
            res.append(CheckResult("discrepancy", "fast = brute force", inst, d1 == d2, f"N={len(fast)}"))

    # interval counts inside a cylinder: |T_v[0,1) & X(lam*alpha_v)| = |X(lam)|
    lam = lams[-1] if len(lams) < 3 else lams[2]
    base = point_set(scheme, lam, max_points=budget)
    for _ in range(3):
        v = _random_word(scheme, rng, 3)
        av = word_alpha(scheme, v)
        if count_A(scheme, lam * av) > budget:
            continue
        big = point_set(scheme, lam * av, max_points=budget)
        left = word_left_endpoint(scheme, v)
        got = big.count_in(left, left + av)
        res.append(CheckResult("enumerate", "cylinder count", f"{name} v={v}", got == len(base), f"{got} vs {len(base)}"))

    ladder = []
    for k, l in enumerate(iter_ladder(scheme)):
        if k > 12:
            break
        ladder.append(l)
    res.append(CheckResult("enumerate", "ladder strictly decreasing", name, all(b < a for a, b in zip(ladder, ladder[1:]))))

    rep = rank_report(scheme)
    res.append(CheckResult("renewal", "entropy positive", name, entropy(scheme, 64).value > 0))
    if rep.is_rank_one:
        x = rep.minimal_base
        M = 14
        rec = lattice_counts(list(rep.exponents.values()), list(rep.progressions.values()), M)
        direct = [count_A(scheme, x**m) for m in range(M + 1)]
        res.append(CheckResult("renewal", "lattice recurrence", name, rec == direct))
        b = taylor_g(scheme, 20)
        ok = all(b[n] == (count_A(scheme, x ** (n - 1)) if n else 0) - x * count_A(scheme, x**n) for n in range(21))
        res.append(CheckResult("spectral", "b_n from counts", name, ok))
    return res


def _random_word(scheme: Scheme, rng: random.Random, length: int):
    syms = [s for s, _, _ in scheme.symbols_at_least(Fraction(1, 50))]
    return tuple(rng.choice(syms) for _ in range(length))


def check_global(rng: random.Random):
    res = []
    try:
        sch.build_scheme([sch.Atom(Fraction(1, 2)), sch.Atom(Fraction(1, 3))])
        res.append(CheckResult("scheme", "mass check rejects 5/6", "[1/2, 1/3]", False))
    except MassNotOne:
        res.append(CheckResult("scheme", "mass check rejects 5/6", "[1/2, 1/3]", True))
    ok = True
    for _ in range(200):
        den = rng.choice([7, 16, 30, 64, 97])
        pts = make_pointset(1, {Fraction(rng.randrange(den), den) for _ in range(rng.randint(1, 64))})
        if extreme_discrepancy(pts) != discrepancy_oracle(pts):
            ok = False
            break
    res.append(CheckResult("discrepancy", "fast = brute force", "200 random sets", ok))

    cf = continued_fraction(log_ratio(2, 3), max_terms=40)
    p, q = cf.convergents[-1]
    with mpmath.workprec(400):
        gap = abs(mpmath.log(2) / mpmath.log(3) - mpmath.mpf(p) / q)
        res.append(CheckResult("spectral", "convergent within 1/q^2", "ln2/ln3", gap < mpmath.mpf(1) / q**2))
    s = sch.bundled("sixths")
    with mpmath.workprec(200):
        z = mpmath.mpc("0.9", "13.7")
        gap = abs(f_eval(s, mpmath.conj(z)) - mpmath.conj(f_eval(s, z)))
        res.append(CheckResult("spectral", "f(conj z) = conj f(z)", "sixths", gap < mpmath.mpf(10) ** -50))
    return res


def run_suite(names=DEFAULT_SCHEMES, budget: int = 200_000, seed: int = 20240601) -> list:
    if budget <= 0:
        raise BudgetExceeded("verification point sets", budget)
    rng = random.Random(seed)
    out = check_global(rng)
    for name in names:
        out.extend(check_scheme(name, sch.resolve(name), budget, rng))
    return out
