"""Command-line front end.

Every command prints either a JSON document ``{"config": ..., "result": ...}``
carrying the fully resolved run configuration, or CSV rows in a fixed order.

Exit codes
----------
0  success
1  an invariant or bound check reported a deviation
2  invalid arguments
3  unreadable or malformed input file
4  a configured resource cap would be exceeded
5  a randomized generator failed
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import secrets
import sys
from collections import Counter
from dataclasses import dataclass, field

from . import bounds, exact_eval, montecarlo, profiles
from .config import Caps, load_caps
from .errors import DimensionError, GenerationError, ProfileParseError, ResourceLimitError, SortitionError, ValidationError
from .metrics import cost_ratio, optimal_cost
from .rules import RULE_IDS

EXIT_OK = 0
EXIT_DEVIATION = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4
EXIT_GENERATION = 5

GEN_KINDS = ("single-issue", "equidistant", "two-cluster", "iid")
METHODS = ("auto", "exact", "enum", "mc")


class _InputError(SortitionError):
    """A file could not be read or written."""


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int | None
    threads: int
    format: str
    caps: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def int_list(text: str) -> list[int]:
    """Parse ``"3,5,9"`` or inclusive ranges ``"1:99"`` / ``"1:99:2"`` (mixable)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                bits = [int(b) for b in part.split(":")]
                if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] < 1):
                    raise ValueError
                step = bits[2] if len(bits) == 3 else 1
                out.extend(range(bits[0], bits[1] + 1, step))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer list element {part!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)


def _finite(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def _emit(cfg: RunConfig, result, rows=None, out=None):
    out = sys.stdout if out is None else out
    if cfg.format == "csv":
        rows = rows if rows is not None else [result]
        if rows:
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _finite(v) for k, v in row.items()})
            out.write(buf.getvalue())
        return
    out.write(json.dumps({"config": cfg.to_dict(), "result": result}, default=_json_default, indent=2))
    out.write("\n")


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(31)
    return args.seed


def _caps(args) -> Caps:
    return args.caps_obj


def _support_histogram(profile) -> dict:
    counts = Counter(profile.support().tolist())
    return {str(k): counts[k] for k in sorted(counts)}


def cmd_gen(args, cfg: RunConfig) -> int:
    caps = _caps(args)
    kind = args.kind
    extra = {}
    if kind == "single-issue":
        _require(args, "n", "n1")
        prof = profiles.single_issue(args.n, args.n1)
    elif kind == "equidistant":
        _require(args, "n", "n1")
        prof = profiles.equidistant_profile(args.n, args.n1, max_n=caps.equidistant_n)
        extra["common_distance"] = float(profiles.equidistant_distance(args.n, args.n1))
    elif kind == "two-cluster":
        _require(args, "n", "m", "alpha", "p", "q", "eps")
        cfg.seed = _resolve_seed(args)
        prof = profiles.two_cluster_profile(
            args.n, args.m, args.alpha, args.p, args.q, args.eps, args.seed, max_attempts=caps.two_cluster_attempts
        )
        extra["concentration"] = profiles.two_cluster_report(prof, int(round(args.alpha * args.n)), args.p, args.q)
    else:
        _require(args, "n", "m", "p")
        cfg.seed = _resolve_seed(args)
        prof = profiles.iid_issue_profile(args.n, args.m, args.p, args.seed)
    try:
        profiles.write_profile(prof, args.out)
    except OSError as exc:
        raise _InputError(f"cannot write {args.out}: {exc}") from None
    result = {"path": args.out, "n": prof.n, "m": prof.m, "support_histogram": _support_histogram(prof), **extra}
    rows = [{"n1": int(k), "issues": v} for k, v in result["support_histogram"].items()]
    _emit(cfg, result, rows)
    return EXIT_OK


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise ValidationError(f"{args.command} {getattr(args, 'kind', '')} requires {', '.join(missing)}".replace("  ", " "))


def _read(path):
    try:
        return profiles.read_profile(path)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from None


def _mc_report(prof, rule, k, args):
    est = montecarlo.mc_expected_cost(
        prof, rule, k, samples=args.samples, seed=args.seed, threads=args.threads, cap=_caps(args).enumeration
    )
    opt = optimal_cost(prof)
    return exact_eval.EvalReport(est.mean, opt, cost_ratio(est.mean, opt), "monte-carlo", {"rule": rule, "k": k, **est.to_dict()})


def _needs_k(rule, k):
    if rule in ("kmaj", "krep", "mindist") and k is None:
        raise ValidationError(f"rule {rule!r} requires --k")


def cmd_eval(args, cfg: RunConfig) -> int:
    prof = _read(args.profile)
    caps = _caps(args)
    rule, k, method = args.rule, args.k, args.method
    _needs_k(rule, k)
    if k is not None and not 1 <= k <= prof.n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={prof.n}")
    if method == "mc" or (method == "auto" and rule in ("krep",) and _over_cap(prof, k, caps)):
        cfg.seed = _resolve_seed(args)
        report = _mc_report(prof, rule, k, args)
    elif method == "enum":
        if rule in ("kmaj", "krep"):
            report = exact_eval.enumerate_expected_cost(prof, k, rule, cap=caps.enumeration)
        else:
            report = exact_eval.expected_cost(prof, rule, k, cap=caps.enumeration, exact_n=caps.exact_binomial_n)
    else:
        report = exact_eval.expected_cost(prof, rule, k, cap=caps.enumeration, exact_n=caps.exact_binomial_n)
    result = report.to_dict()
    row = {
        "rule": rule,
        "k": k,
        "method": report.method,
        "expected_cost": result["expected_cost"],
        "optimal_cost": result["optimal_cost"],
        "ratio": result["ratio"]["value"],
    }
    _emit(cfg, result, [row])
    return EXIT_OK


def _over_cap(prof, k, caps) -> bool:
    _, _, counts = exact_eval._voter_types(prof)
    committees = math.comb(prof.n, k)
    if committees <= caps.enumeration:
        return False
    return exact_eval.count_compositions(counts, k) > caps.enumeration


def cmd_mc(args, cfg: RunConfig) -> int:
    prof = _read(args.profile)
    _needs_k(args.rule, args.k)
    cfg.seed = _resolve_seed(args)
    report = _mc_report(prof, args.rule, args.k, args)
    result = report.to_dict()
    d = report.detail
    row = {
        "rule": args.rule,
        "k": args.k,
        "samples": d["samples"],
        "seed": d["seed"],
        "mean": d["mean"],
        "std_error": d["std_error"],
        "ci95_low": d["ci95"][0],
        "ci95_high": d["ci95"][1],
        "optimal_cost": result["optimal_cost"],
        "ratio": result["ratio"]["value"],
    }
    _emit(cfg, result, [row])
    return EXIT_OK


def cmd_ar_search(args, cfg: RunConfig) -> int:
    ks = args.k if args.k is not None else list(range(1, args.n + 1))
    rows = bounds.ar_rows(args.n, ks)
    bad = [r for r in rows if not r["upper_satisfied"] or r["lower_satisfied"] is False]
    _emit(cfg, {"rows": rows, "violations": len(bad)}, rows)
    return EXIT_DEVIATION if bad else EXIT_OK


def cmd_bounds(args, cfg: RunConfig) -> int:
    rows = bounds.bounds_rows(args.k, args.m)
    lower = bounds.krep_many_issue_lower()
    limit, argmax = bounds.kmaj3_exact_limit()
    result = {
        "rows": rows,
        "kmaj3_limit": {"ratio": limit, "worst_fraction": argmax},
        "krep_many_issue_lower": {"value": float(lower.value), "maximizer": float(lower.maximizer)},
    }
    _emit(cfg, result, rows)
    return EXIT_OK


def cmd_optimality_check(args, cfg: RunConfig) -> int:
    rep = exact_eval.optimality_check(args.n_max, args.k_max)
    rep["summary"] = f"{len(rep['deviations'])} deviations"
    if cfg.format == "csv" and not rep["deviations"]:
        sys.stdout.write("n,n1,k,q,h\n")
    else:
        _emit(cfg, rep, rep["deviations"])
    return EXIT_DEVIATION if rep["deviations"] else EXIT_OK


def cmd_regret_scan(args, cfg: RunConfig) -> int:
    grid = [k for k in args.k_grid if 1 <= k <= args.n]
    if not grid:
        raise ValidationError(f"no grid value lies in 1..{args.n}")
    best, table = bounds.optimal_k_scan(args.n, args.c, grid)
    for row in table:
        row["best"] = row["k"] == best
    result = {"best_k": best, "table": table}
    code = EXIT_OK
    if args.scaling_factor:
        check = bounds.regret_scaling_check(args.n, args.c, args.k_grid, factor=args.scaling_factor)
        result["scaling"] = check
        code = EXIT_OK if check["consistent"] else EXIT_DEVIATION
    _emit(cfg, result, table)
    return code


def _add_globals(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--format", choices=("json", "csv"), default=default if suppress else "json")
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--threads", type=int, default=default if suppress else os.cpu_count() or 1)
    parser.add_argument("--caps-config", default=default, metavar="PATH", help="JSON object overriding size caps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sortition", description="Evaluate committee voting rules on binary multi-issue profiles."
    )
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)

    p = sub.add_parser("gen", parents=[common], help="generate a profile file")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--n1", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--out", required=True, help="profile file to write")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", parents=[common], help="expected cost and ratio of one rule")
    p.add_argument("profile")
    p.add_argument("--rule", choices=RULE_IDS, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo estimate of one rule")
    p.add_argument("profile")
    p.add_argument("--rule", choices=RULE_IDS, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("ar-search", parents=[common], help="worst one-issue ratio of k-sortition")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int_list, help="committee sizes, e.g. 3,5 or 1:99 (default: all)")
    p.set_defaults(func=cmd_ar_search)

    p = sub.add_parser("bounds", parents=[common], help="closed-form bound table")
    p.add_argument("--k", type=int_list, required=True)
    p.add_argument("--m", type=int_list, default=[1])
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("optimality-check", parents=[common], help="compare optimal issue-wise thresholds with majority")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.set_defaults(func=cmd_optimality_check)

    p = sub.add_parser("regret-scan", parents=[common], help="committee size minimizing worst-case regret")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True, help="elicitation cost per member and issue")
    p.add_argument("--k-grid", type=int_list, required=True)
    p.add_argument("--scaling-factor", type=int, help="also scan at this multiple of n and compare optimal sizes")
    p.set_defaults(func=cmd_regret_scan)
    return parser


def _params(args) -> dict:
    skip = {"func", "format", "seed", "threads", "caps_config", "caps_obj", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads < 1:
            raise ValidationError(f"--threads must be >= 1, got {args.threads}")
        try:
            args.caps_obj = load_caps(args.caps_config)
        except (OSError, json.JSONDecodeError) as exc:
            raise _InputError(f"cannot load caps config: {exc}") from None
        except TypeError as exc:
            raise ValidationError(f"bad caps config: {exc}") from None
        cfg = RunConfig(args.command, _params(args), args.seed, args.threads, args.format, dataclasses.asdict(args.caps_obj))
        return args.func(args, cfg)
    except (ProfileParseError, DimensionError, _InputError) as exc:
        code, msg = EXIT_INPUT, str(exc)
    except ResourceLimitError as exc:
        code, msg = EXIT_RESOURCE, str(exc)
    except GenerationError as exc:
        code, msg = EXIT_GENERATION, str(exc)
    except ValidationError as exc:
        code, msg = EXIT_USAGE, str(exc)
    print(f"sortition {args.command}: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
