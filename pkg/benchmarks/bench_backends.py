"""Compiled vs pure-Python kernels on point generation and discrepancy.

    python3 benchmarks/bench_backends.py [--repeat 3] [--json out.json]

Each row times ``point_set`` followed by ``extreme_discrepancy`` for one
scheme and threshold on both backends, plus the exact-rational word walk
for the smaller sets.  Results are checked to be identical before timing
is reported.
"""

from __future__ import annotations

import argparse
import json
import time
from fractions import Fraction

from kakutani import kernels
from kakutani import scheme as sch
from kakutani.discrepancy import extreme_discrepancy
from kakutani.enumeration import point_set, point_set_by_words

CASES = [
    ("dyadic", Fraction(1, 2**16)),
    ("third", Fraction(1, 10**5)),
    ("fig3", Fraction(1, 10**5)),
    ("sixths", Fraction(1, 10**5)),
    ("sixths", Fraction(1, 10**6)),
    ("rank-three", Fraction(1, 10**6)),
]
WORDS_LIMIT = 200_000


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(repeat: int):
    if kernels._ckernels is None:
        raise SystemExit("compiled kernels are not built; reinstall with Cython available")
    rows = []
    for name, lam in CASES:
        s = sch.bundled(name)

        def job(backend):
            ps = point_set(s, lam, max_points=None, backend=backend)
            return ps, extreme_discrepancy(ps, backend=backend)

        tc, (ps_c, d_c) = best_of(lambda: job("cython"), repeat)
        tp, (ps_p, d_p) = best_of(lambda: job("python"), repeat)
        if ps_c != ps_p or d_c != d_p:
            raise SystemExit(f"backends disagree on {name} at {lam}")
        tw = None
        if ps_c.n_words <= WORDS_LIMIT:
            tw, ps_w = best_of(lambda: point_set_by_words(s, lam), 1)
            if ps_w.points != ps_c.points:
                raise SystemExit(f"word walk disagrees on {name} at {lam}")
        rows.append(
            {
                "scheme": name,
                "lambda": f"{lam.numerator}/{lam.denominator}",
                "points": len(ps_c),
                "compiled_s": tc,
                "pure_s": tp,
                "speedup": tp / tc,
                "rational_words_s": tw,
            }
        )
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"{'scheme':<11} {'lambda':>10} {'points':>9} {'compiled':>10} {'pure':>9} {'speedup':>8} {'rational':>9}")
    for r in rows:
        tw = f"{r['rational_words_s']:.3f}" if r["rational_words_s"] is not None else "-"
        print(
            f"{r['scheme']:<11} {r['lambda']:>10} {r['points']:>9} {r['compiled_s']:>10.4f} "
            f"{r['pure_s']:>9.4f} {r['speedup']:>7.1f}x {tw:>9}"
        )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
