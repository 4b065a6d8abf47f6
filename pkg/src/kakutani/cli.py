"""Command line entry point.

Subcommands: partitions, points, count, analyze, discrepancy, verify.
Every run is deterministic for a fixed configuration.  Exit codes: 0 ok,
2 configuration error, 3 budget exceeded, 4 invariant failure, 5 numeric
certification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional

import mpmath

from . import discrepancy as disc
from . import enumeration as en
from .errors import BudgetExceeded, ConfigError, InvariantFailure, KakutaniError, NotRankOne
from .renewal import DEFAULT_PREC, predicted_limit, rank_report, report_fragment
from .scheme import SCHEMA_VERSION, Scheme, as_fraction, fraction_str, resolve, scheme_from_dict, scheme_to_dict
from .svg import curve_svg, partitions_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 4

GRID_KINDS = ("ladder", "geometric", "decade")
EPS_SWEEP = (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2))

# keys a config file may set, per command; global keys are always allowed
GLOBAL_KEYS = {"schema_version", "command", "scheme", "precision", "threads", "budget", "max_memo", "out", "svg"}
COMMAND_KEYS = {
    "partitions": {"levels", "min_len"},
    "points": {"lam", "level", "format"},
    "count": {"grid"},
    "analyze": {"taylor_terms"},
    "discrepancy": {"grid", "fit"},
    "verify": {"schemes", "seed"},
}


# -- configuration ---------------------------------------------------------------


def load_config(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"config needs schema_version {SCHEMA_VERSION}")
    if "command" in data and data["command"] != command:
        raise ConfigError(f"config is for {data['command']!r}, not {command!r}")
    unknown = set(data) - GLOBAL_KEYS - COMMAND_KEYS[command]
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    return data


def merge_config(args, data: dict) -> None:
    """Fill options not given on the command line from the config."""
    for key, value in data.items():
        if key in ("schema_version", "command"):
            continue
        if getattr(args, key, None) in (None, False, []):
            setattr(args, key, value)


def scheme_arg(value) -> Scheme:
    if value is None:
        raise ConfigError("no scheme given (positional argument or config 'scheme')")
    if isinstance(value, dict):
        return scheme_from_dict(value)
    return resolve(str(value))


def parse_grid(spec, scheme: Optional[Scheme] = None) -> list:
    """``ladder:FIRST:LAST``, ``geometric:BASE:FIRST:LAST`` or ``decade:PER:FIRST:LAST``.

    A config may give the same as ``{"kind", "start", "stop", "base" | "per_decade"}``.
    """
    if isinstance(spec, dict):
        extra = set(spec) - {"kind", "start", "stop", "base", "per_decade"}
        if extra:
            raise ConfigError(f"unknown grid fields {sorted(extra)}")
        kind = spec.get("kind")
        start, stop = spec.get("start"), spec.get("stop")
        if kind == "geometric":
            parts = [kind, spec.get("base"), start, stop]
        elif kind == "decade":
            parts = [kind, spec.get("per_decade", 4), start, stop]
        else:
            parts = [kind, start, stop]
    else:
        parts = str(spec).split(":")
    kind = parts[0]
    try:
        if kind == "ladder" and len(parts) == 3:
            grid = disc.ladder_grid(scheme, int(parts[1]), int(parts[2]))
        elif kind == "geometric" and len(parts) == 4:
            grid = disc.geometric_grid(as_fraction(str(parts[1])), int(parts[2]), int(parts[3]))
        elif kind == "decade" and len(parts) == 4:
            grid = disc.decade_grid(int(parts[1]), int(parts[2]), int(parts[3]))
        else:
            raise ConfigError(f"bad grid spec {spec!r}; kinds are {', '.join(GRID_KINDS)}")
        return disc.check_grid(grid)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad grid spec {spec!r}: {exc}") from exc


def auto_grid(scheme: Scheme, budget: int) -> list:
    """Rank one: powers of the base; otherwise four points per decade.  Cut at the budget."""
    rep = rank_report(scheme)
    if rep.is_rank_one:
        cands = (rep.minimal_base**n for n in range(1, 4000))
    else:
        cands = iter(disc.decade_grid(4, 1, 60))
    grid = disc._budget_levels(scheme, cands, budget)
    if not grid:
        raise BudgetExceeded("discrepancy grid", budget)
    return grid


class Output:
    """Writes named artifacts to ``--out``; without it, the main one goes to
    stdout and secondary text (fit summaries) to stderr."""

    def __init__(self, out_dir: Optional[str]):
        self.dir = out_dir
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)

    def emit(self, name: str, text: str, primary: bool = True):
        if self.dir:
            path = os.path.join(self.dir, name)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            print(f"wrote {path}")
        else:
            (sys.stdout if primary else sys.stderr).write(text)

    def side(self, name: str, text: str):
        """Secondary artifacts (SVG) go to the current directory without --out."""
        path = os.path.join(self.dir or ".", name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {path}", file=sys.stderr if not self.dir else sys.stdout)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def mp_str(v, digits=30) -> str:
    return mpmath.nstr(v, digits, strip_zeros=False)


# -- commands ----------------------------------------------------------------------


def cmd_partitions(args) -> int:
    scheme = scheme_arg(args.scheme)
    levels = int(args.levels if args.levels is not None else 7)
    min_len = as_fraction(str(args.min_len)) if args.min_len is not None else Fraction(1, 10_000)
    rows = []
    lv = []
    for n in range(levels + 1):
        level = en.partition_level(scheme, n, min_len, cap=args.budget)
        lv.append(level)
        split = en.length_ladder(scheme, n)[-1] if n else Fraction(1)
        ends = " ".join(fraction_str(e) for e in level.endpoints())
        rows.append(f"{n},{fraction_str(split)},{len(level)},{fraction_str(level.missing_mass)},{ends}")
    text = "level,largest_length,n_intervals,missing_mass,endpoints\n" + "\n".join(rows) + "\n"
    out = Output(args.out)
    out.emit("partitions.csv", text)
    if args.svg:
        out.side("partitions.svg", partitions_svg(lv, title=_scheme_label(scheme)))
    return EXIT_OK


def cmd_points(args) -> int:
    scheme = scheme_arg(args.scheme)
    if args.lam is not None and args.level is not None:
        raise ConfigError("give either --lambda or --level")
    if args.level is not None:
        ps = en.L_n(scheme, int(args.level), max_points=args.budget)
    elif args.lam is not None:
        ps = en.point_set(scheme, as_fraction(str(args.lam)), max_points=args.budget)
    else:
        raise ConfigError("points needs --lambda or --level")
    fmt = args.format or "csv"
    out = Output(args.out)
    if fmt == "csv":
        out.emit("points.csv", en.pointset_csv(ps))
    elif fmt == "json":
        out.emit("points.json", en.pointset_json(ps))
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    return EXIT_OK


def _distinct_count(scheme: Scheme, lam, memo, budget):
    """``|X(lam)|``: by the leading-symbol identity when a symbol fixes 0."""
    if scheme.zero_symbol is not None:
        a1 = scheme.alpha(scheme.zero_symbol)
        return en.count_A(scheme, lam, memo=memo) - en.count_A(scheme, lam / a1, memo=memo)
    return len(en.point_set(scheme, lam, max_points=budget))


def cmd_count(args) -> int:
    scheme = scheme_arg(args.scheme)
    grid = parse_grid(args.grid or "decade:4:0:6", scheme)
    lim = predicted_limit(scheme, args.precision)
    const = mp_str(lim.constant, 20)
    memo = {}
    lines = ["lambda_exact,lambda_float,count_A,count_X,lambda_count_A,predicted_constant"]
    for lam in grid:
        c = en.count_A(scheme, lam, memo=memo, max_memo=args.max_memo)
        x = _distinct_count(scheme, lam, memo, args.budget)
        lines.append(
            f"{fraction_str(lam)},{float(lam):.17g},{c},{x},{en.decimal_str(lam * c, 20)},{const}"
        )
    Output(args.out).emit("count.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def _section(fn):
    try:
        return fn()
    except KakutaniError as exc:
        return {"error": {"type": type(exc).__name__, "code": exc.exit_code, "message": str(exc)}}


def analysis_report(scheme: Scheme, prec: int = DEFAULT_PREC, taylor_terms: int = 12) -> dict:
    from .spectral import (
        PowerBasis,
        denominator_series,
        estimate_bad_approx_r,
        predicted_P_star,
        radius_R_star,
        taylor_g,
    )

    digits = max(15, int(prec * math.log10(2)) - 5)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scheme": scheme_to_dict(scheme),
        "precision_bits": prec,
        "renewal": _section(lambda: report_fragment(scheme, prec)),
    }
    rep = rank_report(scheme)

    def rank_one():
        pb = PowerBasis.from_scheme(scheme, prec)
        num, den = denominator_series(pb)
        sweep = []
        best = None
        for e in EPS_SWEEP:
            rs = radius_R_star(pb, e, prec)
            entry = {
                "eps": fraction_str(e),
                "R_star": mp_str(rs.value, digits),
                "disk": mp_str(rs.disk, digits),
                "limited_by": "root" if rs.limiting_root is not None else "disk",
                "spurious_roots": len(rs.spurious),
            }
            sweep.append(entry)
            if best is None or rs.value > best.value:
                best = rs
        with mpmath.workprec(prec):
            lo = pb.base / best.value
        b = taylor_g(pb, taylor_terms, prec)
        return {
            "mode": "geometric",
            "numerator": num,
            "denominator": den,
            "taylor_g": [fraction_str(v) if isinstance(v, Fraction) else mp_str(v, digits) for v in b],
            "R_star_sweep": sweep,
            "R_star": mp_str(best.value, digits),
            "R_star_eps": fraction_str(best.eps),
            "rho_interval": [mp_str(lo, digits), "1"],
        }

    def higher_rank():
        est = estimate_bad_approx_r(scheme)
        out = {
            "mode": "logpower",
            "pair": [fraction_str(est.pair[0]), fraction_str(est.pair[1])],
            "r_hat": f"{est.r_hat:.12g}",
            "r_hat_kind": "empirical estimate from certified continued-fraction terms, not a proof",
            "certified_up_to": est.certified_up_to,
            "q_min": est.q_min,
            "quotients": est.quotients[:30],
        }
        out["P_star"] = _section(lambda: f"{float(predicted_P_star(est.r_hat)):.12g}")
        return out

    doc["spectral"] = _section(rank_one if rep.is_rank_one else higher_rank)
    return doc


def cmd_analyze(args) -> int:
    scheme = scheme_arg(args.scheme)
    terms = int(args.taylor_terms) if args.taylor_terms is not None else 12
    Output(args.out).emit("analysis.json", dump_json(analysis_report(scheme, args.precision, terms)))
    return EXIT_OK


def cmd_discrepancy(args) -> int:
    scheme = scheme_arg(args.scheme)
    budget = args.budget or en.DEFAULT_MAX_POINTS
    grid = parse_grid(args.grid, scheme) if args.grid else auto_grid(scheme, min(budget, 1_000_000))
    curve = disc.discrepancy_curve(scheme, grid, threads=args.threads, max_points=budget)
    out = Output(args.out)
    out.emit("discrepancy.csv", disc.curve_csv(curve))
    fit = args.fit or "auto"
    if fit == "auto":
        fit = disc.GEOMETRIC if rank_report(scheme).is_rank_one else disc.LOGPOWER
    doc = {"schema_version": SCHEMA_VERSION, "scheme": scheme_to_dict(scheme), "points": len(curve)}
    if fit != "none":
        if fit == disc.GEOMETRIC:
            try:
                x = rank_report(scheme).minimal_base
                if x is None:
                    raise NotRankOne("geometric fit needs a rank-one base")
                pts = [(_step(v.lam, x), v.extreme) for v in curve]
            except NotRankOne:
                pts = [(n, v.extreme) for n, v in enumerate(curve)]
        elif fit == disc.LOGPOWER:
            pts = [(v.lam, v.extreme) for v in curve]
        else:
            raise ConfigError(f"unknown fit {fit!r}")
        doc["fit"] = _section(lambda: disc.fit_json(disc.fit_decay(pts, fit)))
    out.emit("fit.json", dump_json(doc), primary=False)
    if args.svg:
        out.side("discrepancy.svg", curve_svg(curve, title=_scheme_label(scheme)))
    return EXIT_OK


def _step(lam: Fraction, x: Fraction) -> float:
    """``n`` with ``lam = x**n`` (fractional for off-lattice grids)."""
    return math.log(lam) / math.log(x)


def cmd_verify(args) -> int:
    from .verify import DEFAULT_SCHEMES, run_suite

    names = args.schemes or list(DEFAULT_SCHEMES)
    budget = args.budget if args.budget is not None else 200_000
    seed = int(args.seed) if args.seed is not None else 20240601
    results = run_suite(names, budget=budget, seed=seed)
    lines = [r.line() for r in results]
    failed = sum(not r.ok for r in results)
    lines.append(f"{len(results) - failed} passed, {failed} failed")
    Output(args.out).emit("verify.txt", "\n".join(lines) + "\n")
    if failed:
        raise InvariantFailure(f"{failed} invariant checks failed")
    return EXIT_OK


def _scheme_label(scheme: Scheme) -> str:
    parts = []
    for b in scheme.blocks:
        if hasattr(b, "ratio"):
            parts.append(f"geo({fraction_str(b.first)},{fraction_str(b.ratio)},{b.direction})")
        else:
            parts.append(fraction_str(b.length))
    return "[" + ", ".join(parts) + "]"


# -- argument parsing --------------------------------------------------------------


def _global_flags(parser, default):
    parser.add_argument("--config", metavar="PATH", default=default, help="JSON experiment config")
    parser.add_argument(
        "--precision", type=int, metavar="BITS", default=default, help=f"working precision (default {DEFAULT_PREC})"
    )
    parser.add_argument("--threads", type=int, metavar="N", default=default, help="worker threads for per-lambda work")
    parser.add_argument("--budget", type=int, metavar="N", default=default, help="maximum words/points per set")
    parser.add_argument("--out", metavar="DIR", default=default, help="write artifacts to DIR instead of stdout")
    parser.add_argument("--svg", action="store_true", default=default, help="also emit an SVG figure")


def build_parser() -> argparse.ArgumentParser:
    # the flags are accepted before or after the subcommand; the copies on
    # the subcommands must not reset values given before it
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="kakutani", description=__doc__.split("\n")[0])
    _global_flags(p, None)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("scheme", nargs="?", help="bundled name, inline spec like '1/2,geo(1/3,1/3)', or .json")
        return sp

    sp = add("partitions", "list the partitions P_0..P_n")
    sp.add_argument("-n", "--levels", type=int, help="last level (default 7)")
    sp.add_argument("--min-len", dest="min_len", help="shortest interval listed for infinite schemes")

    sp = add("points", "endpoint set X(lambda) or L_n")
    sp.add_argument("--lambda", dest="lam", help="threshold, e.g. 1/1000")
    sp.add_argument("--level", type=int, help="ladder level n (gives L_n)")
    sp.add_argument("--format", choices=("csv", "json"))

    sp = add("count", "word and endpoint counts along a grid")
    sp.add_argument("--grid", help="ladder:A:B | geometric:BASE:A:B | decade:PER:A:B")

    sp = add("analyze", "rank, entropy, limits and spectral data as JSON")
    sp.add_argument("--taylor-terms", dest="taylor_terms", type=int)

    sp = add("discrepancy", "discrepancy curve and decay fit")
    sp.add_argument("--grid", help="ladder:A:B | geometric:BASE:A:B | decade:PER:A:B (default: budgeted auto grid)")
    sp.add_argument("--fit", choices=("auto", "geometric", "logpower", "none"))

    sp = sub.add_parser("verify", help="run the invariant batteries", parents=[common])
    sp.add_argument("schemes", nargs="*", help="schemes to check (default: all bundled)")
    sp.add_argument("--seed", type=int)
    return p


def _finish_args(args):
    if args.config:
        merge_config(args, load_config(args.config, args.command))
    if args.precision is None:
        args.precision = DEFAULT_PREC
    if int(args.precision) < 64:
        raise ConfigError("precision must be at least 64 bits")
    args.precision = int(args.precision)
    args.threads = int(args.threads or 1)
    if args.threads < 1:
        raise ConfigError("threads must be positive")
    if args.budget is not None:
        args.budget = int(args.budget)
        if args.budget < 0:
            raise ConfigError("budget must be non-negative")
        if args.budget == 0 and args.command != "verify":
            raise BudgetExceeded("work", 0)
    if getattr(args, "max_memo", None) is None:
        args.max_memo = en.DEFAULT_MAX_MEMO
    return args


COMMANDS = {
    "partitions": cmd_partitions,
    "points": cmd_points,
    "count": cmd_count,
    "analyze": cmd_analyze,
    "discrepancy": cmd_discrepancy,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _finish_args(args)
        return COMMANDS[args.command](args)
    except KakutaniError as exc:
        return _fail(type(exc).__name__, exc.exit_code, str(exc))
    except RuntimeError as exc:
        # kernel count mismatches and similar internal consistency checks
        return _fail("InvariantFailure", EXIT_INVARIANT, str(exc))
    except ValueError as exc:
        return _fail("ConfigError", EXIT_CONFIG, str(exc))


def _fail(kind: str, code: int, message: str) -> int:
    print(json.dumps({"error": kind, "code": code, "message": message}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
