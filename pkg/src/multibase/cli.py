"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 numeric failure,
4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from . import asymptotics as asy
from .errors import DomainError, MultibaseError, NumericError, ResourceLimit
from .exact import (
    build_count_table,
    count_brute_force,
    log_int,
)
from .model import BaseSystem, Statistic
from .saddle import GFKind, estimate_moments, solve_saddle
from .sampling import build_sampler, normality_report, sample_many
from .smooth import elements_upto
from .tails import verify_tail_bounds

EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_RESOURCE = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_int(text: str) -> int:
    """Integer flag that also accepts scientific notation (floored)."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_finite():
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return int(value.to_integral_value(rounding="ROUND_FLOOR"))


def parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_bases(text: str) -> tuple[int, ...]:
    try:
        return tuple(parse_int(p) for p in text.split(",") if p.strip())
    except argparse.ArgumentTypeError as e:
        raise argparse.ArgumentTypeError(f"bad base list {text!r}: {e}") from None


def parse_float_list(text: str) -> list[float]:
    return [parse_float(x) for x in text.split(",") if x.strip()]


# -- output -----------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):  # numpy scalar
        return _jsonable(x.item())
    return str(x)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def _text(obj) -> str:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                v = dumps(v)
            lines.append(f"{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_text(v) if isinstance(v, dict) else str(v) for v in obj)
    return str(obj)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (dumps(v) if isinstance(v, (dict, list)) else v) for k, v in row.items()})
    return buf.getvalue().rstrip("\n")


def emit(result, fmt: str, out, rows: list[dict] | None = None, text: str | None = None):
    if fmt == "json":
        out.write(dumps(result) + "\n")
    elif fmt == "csv":
        if rows is None:
            rows = [result] if isinstance(result, dict) else [{"value": v} for v in result]
        out.write(_csv(rows) + "\n")
    else:
        out.write((text if text is not None else _text(result)) + "\n")


# -- subcommands --------------------------------------------------------------

def _system(args) -> BaseSystem:
    return BaseSystem(args.bases, args.digits)


def _header(system: BaseSystem) -> dict:
    return {"bases": list(system.bases), "digits": system.digit_bound}


def cmd_seq(args, out):
    system = _system(args)
    xs = elements_upto(system.bases, args.limit)
    emit(xs, args.format, out, rows=[{"h": h} for h in xs])


def cmd_count(args, out):
    system = _system(args)
    if args.table is not None:
        table = build_count_table(system, args.table, method=args.method)
        counts = [str(c) for c in table.counts]
        rows = [{"n": n, "count": c} for n, c in enumerate(counts)]
        emit({**_header(system), "limit": args.table, "counts": counts}, args.format, out,
             rows=rows, text="\n".join(f"{n} {c}" for n, c in enumerate(counts)))
        return
    if args.n is None:
        raise UsageError("count needs --n or --table")
    if args.brute:
        value = count_brute_force(system, args.n)
    else:
        value = build_count_table(system, args.n, method=args.method)[args.n]
    res = {**_header(system), "n": args.n, "count": str(value)}
    emit(res, args.format, out, rows=[{"n": args.n, "count": str(value)}], text=str(value))


def _two_p(system: BaseSystem) -> int:
    if system.m != 2 or system.bases[0] != 2 or system.digit_bound != 2:
        raise DomainError("this formula needs bases 2,p with digits 2")
    return system.bases[1]


def cmd_asym(args, out):
    system = _system(args)
    n = args.n
    res = {**_header(system), "theorem": args.theorem, "n": n}
    exact_arg = n
    if args.theorem == "1":
        c = asy.theorem1_constants(system)
        res.update(kappa=c.kappa, C0=c.C0, C1=c.C1, C2=c.C2,
                   log_estimate=asy.theorem1_log_estimate(system, n))
    elif args.theorem == "2":
        c = asy.theorem2_constants(system)
        res.update(kappa=c.kappa, K0=c.K0, K1=c.K1,
                   log_main=asy.theorem2_log_main(system, n))
    elif args.theorem == "mahler":
        p = _two_p(system)
        res.update(p=p, log_estimate=asy.mahler_log_estimate(p, n))
        exact_arg = p * n
    elif args.theorem == "pennington":
        p = _two_p(system)
        res.update(p=p, log_estimate=asy.pennington_log_estimate(p, n))
        exact_arg = p * n
    else:  # clt
        stat = Statistic.parse(args.statistic)
        pred = asy.clt_prediction(system, stat)
        res.update(statistic=str(stat), mean_coeff=pred.mean_coeff, var_coeff=pred.var_coeff,
                   predicted_mean=pred.mean(n, system.m),
                   predicted_variance=pred.variance(n, system.m))
    if args.compare and args.theorem != "clt":
        P = build_count_table(system, exact_arg)[exact_arg]
        logp = log_int(P)
        res.update(exact_count=str(P), log_exact=logp)
        if "log_estimate" in res:
            res["residual"] = logp - res["log_estimate"]
        else:
            res["log_K"] = logp - res["log_main"]
    emit(res, args.format, out)


def cmd_saddle(args, out):
    system = _system(args)
    kind = GFKind.parse(args.kind)
    r = solve_saddle(system, kind, args.n, args.u, tol=args.tol, allow_wide_u=args.allow_wide_u)
    e = r.evaluation
    res = {**_header(system), "n": r.n, "kind": str(kind), "u": r.u, "r": r.r,
           "log_estimate": r.log_estimate, "chernoff_bound": r.chernoff_bound,
           "residual": r.residual, "tail_bound": e.tail_bound, "f_tt": e.f_tt,
           "terms": e.terms, "truncation_cutoff": e.truncation_cutoff}
    if args.statistic:
        stat = Statistic.parse(args.statistic)
        mom = estimate_moments(system, args.n, stat, refined=args.refined)
        res.update(statistic=str(stat), mean_estimate=mom.mean, variance_estimate=mom.variance)
    emit(res, args.format, out)


def cmd_stats(args, out):
    system = _system(args)
    stat = Statistic.parse(args.statistic)
    if args.samples is not None:
        rep = normality_report(system, args.n, stat, "sampled", args.samples, args.seed,
                               args.position, args.digit)
    else:
        rep = normality_report(system, args.n, stat, "exact",
                               position=args.position, digit=args.digit)
    emit({**_header(system), **rep.to_dict()}, args.format, out)


def cmd_sample(args, out):
    system = _system(args)
    sampler = build_sampler(system, args.n)
    reps = sample_many(sampler, args.count, args.seed)
    items = [[[h, a] for h, a in rep.terms] for rep in reps]
    res = {**_header(system), "n": args.n, "seed": args.seed, "count": args.count,
           "total": str(sampler.total), "samples": items}
    text = "\n".join(" + ".join(f"{a}*{h}" if a > 1 else str(h) for h, a in rep.terms) or "0"
                     for rep in reps)
    rows = [{"index": i, "terms": t} for i, t in enumerate(items)]
    emit(res, args.format, out, rows=rows, text=text)


def fluct_rows(system: BaseSystem, start, ratio, stop, pennington: bool = False) -> list[dict]:
    grid = asy.geometric_grid(start, ratio, stop)
    top = grid[-1] if grid else 0
    p = _two_p(system) if pennington else None
    table = build_count_table(system, top * p if p else top)
    rows = []
    for n in grid:
        lk = asy.log_fluctuation_K(system, n, table[n])
        row = {"n": n, "log_P": table.log(n), "log_K": lk, "K": math.exp(lk)}
        if p:
            row["pennington_remainder"] = table.log(p * n) - asy.pennington_log_estimate(p, n)
        rows.append(row)
    return rows


def cmd_fluct(args, out):
    system = _system(args)
    rows = fluct_rows(system, args.start, args.ratio, args.stop, args.pennington)
    ks = [r["K"] for r in rows]
    res = {**_header(system), "rows": rows,
           "K_min": min(ks), "K_max": max(ks), "K_ratio": max(ks) / min(ks)}
    if args.pennington:
        res["max_abs_pennington_remainder"] = max(abs(r["pennington_remainder"]) for r in rows)
    text = "\n".join(" ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in r.values())
                     for r in rows)
    emit(res, args.format, out, rows=rows, text=text)


def cmd_tails(args, out):
    system = _system(args)
    rep = verify_tail_bounds(system, args.r, args.y_resolution, GFKind.parse(args.kind), args.u)
    res = {**_header(system), **rep.to_dict()}
    emit(res, args.format, out, rows=rep.per_r)


# -- report -------------------------------------------------------------------

def _lookup(obj, path: str):
    for key in path.split("."):
        obj = obj[int(key)] if isinstance(obj, list) else obj[key]
    return obj


def _check(value, rule: dict) -> bool:
    v = float(value) if isinstance(value, str) and rule.keys() & {"min", "max"} else value
    ok = True
    if "equals" in rule:
        ok &= v == rule["equals"]
    if "min" in rule:
        ok &= v >= rule["min"]
    if "max" in rule:
        ok &= v <= rule["max"]
    return bool(ok)


def cmd_report(args, out):
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {args.config}: {e}") from None
    bundles = config.get("bundles", {})
    name = args.bundle or config.get("default")
    if name not in bundles:
        raise UsageError(f"bundle {name!r} not in config (have {sorted(bundles)})")
    results = []
    all_ok = True
    for entry in bundles[name]:
        buf = io.StringIO()
        code = run(list(entry["args"]) + ["--format", "json"], out=buf, err=io.StringIO())
        item = {"name": entry["name"], "exit_code": code, "checks": []}
        ok = code == 0
        if ok:
            payload = json.loads(buf.getvalue())
            for chk in entry.get("checks", []):
                value = _lookup(payload, chk["field"])
                passed = _check(value, chk)
                item["checks"].append({**chk, "value": value, "passed": passed})
                ok &= passed
        item["passed"] = ok
        all_ok &= ok
        results.append(item)
    res = {"bundle": name, "passed": all_ok, "results": results}
    text = "\n".join(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}" for r in results)
    emit(res, args.format, out, rows=[{"name": r["name"], "passed": r["passed"]} for r in results],
         text=text)
    return 0 if all_ok else EXIT_NUMERIC


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--bases", type=parse_bases, default=(2, 3),
                        help="comma-separated increasing coprime bases (default 2,3)")
    common.add_argument("--digits", type=parse_int, default=2, help="digit bound d (default 2)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = _Parser(prog="multibase", description="Counting and analysing multi-base representations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("seq", parents=[common], help="elements of S up to a limit")
    s.add_argument("--limit", type=parse_int, required=True)
    s.set_defaults(func=cmd_seq)

    s = sub.add_parser("count", parents=[common], help="exact P(n) or a table of P(0..N)")
    s.add_argument("--n", type=parse_int)
    s.add_argument("--table", type=parse_int, metavar="N")
    s.add_argument("--brute", action="store_true", help="use the brute-force oracle")
    s.add_argument("--method", choices=("sliding", "naive"), default="sliding")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("asym", parents=[common], help="closed-form asymptotic estimates")
    s.add_argument("--theorem", choices=("1", "2", "mahler", "pennington", "clt"), required=True)
    s.add_argument("--n", type=parse_int, required=True)
    s.add_argument("--statistic", default="sum")
    s.add_argument("--compare", action="store_true", help="also compute the exact count")
    s.set_defaults(func=cmd_asym)

    s = sub.add_parser("saddle", parents=[common], help="saddle-point estimate of P(n)")
    s.add_argument("--n", type=parse_int, required=True)
    s.add_argument("--kind", default="F", help="F, G or H:b")
    s.add_argument("--u", type=parse_float, default=1.0)
    s.add_argument("--tol", type=parse_float, default=1e-10)
    s.add_argument("--allow-wide-u", action="store_true")
    s.add_argument("--statistic", help="also estimate mean and variance of this statistic")
    s.add_argument("--refined", action="store_true", help="refined variance estimate")
    s.set_defaults(func=cmd_saddle)

    s = sub.add_parser("stats", parents=[common], help="moments and normality of a statistic")
    s.add_argument("--n", type=parse_int, required=True)
    s.add_argument("--statistic", default="sum", help="sum, weight or digit:b")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact distribution (default)")
    mode.add_argument("--samples", type=parse_int)
    s.add_argument("--seed", type=parse_int, default=0)
    s.add_argument("--position", type=parse_int, default=1)
    s.add_argument("--digit", type=parse_int, default=1)
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("sample", parents=[common], help="uniform random representations")
    s.add_argument("--n", type=parse_int, required=True)
    s.add_argument("--count", type=parse_int, default=1)
    s.add_argument("--seed", type=parse_int, default=0)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("fluct", parents=[common], help="fluctuating factor K(n) on a geometric grid")
    s.add_argument("--start", type=parse_float, default=1000)
    s.add_argument("--ratio", type=parse_float, default=1.1)
    s.add_argument("--stop", type=parse_float, default=1e6)
    s.add_argument("--pennington", action="store_true",
                   help="add log P(p n) minus the three-term expansion")
    s.set_defaults(func=cmd_fluct)

    s = sub.add_parser("tails", parents=[common], help="grid check of the tail estimates")
    s.add_argument("--r", type=parse_float_list, default=[1e-2, 1e-3, 1e-4])
    s.add_argument("--y-resolution", type=parse_int, default=1024)
    s.add_argument("--kind", default="F")
    s.add_argument("--u", type=parse_float, default=1.0)
    s.set_defaults(func=cmd_tails)

    s = sub.add_parser("report", parents=[common], help="run a bundle of checks from a config")
    s.add_argument("--config", required=True)
    s.add_argument("--bundle")
    s.set_defaults(func=cmd_report)
    return p


def _describe(e: Exception) -> str:
    name, msg = type(e).__name__, str(e)
    return msg if msg.startswith(name) else f"{name}: {msg}"


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out) or 0
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except DomainError as e:
        err.write(_describe(e) + "\n")
        return EXIT_DOMAIN
    except NumericError as e:
        err.write(_describe(e) + "\n")
        return EXIT_NUMERIC
    except (ResourceLimit, MemoryError) as e:
        err.write(_describe(e) + "\n")
        return EXIT_RESOURCE
    except MultibaseError as e:
        err.write(_describe(e) + "\n")
        return EXIT_NUMERIC
    except ValueError as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
