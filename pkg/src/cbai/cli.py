"""Command-line interface: ``cbai {run,sweep,ingest,complexity,trial-trace}``.

Exit codes:

    0  success (truncated trials only produce a warning line)
    1  unexpected internal error
    2  missing input file or bad command-line usage
    3  invalid configuration, including a non-identifiable best arm
    4  infeasible bound (non-positive effective gap)

Errors are written to stderr as one line:
``error code=<n> kind=<ExceptionName> message=<json string>``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .bandit import ArmDistribution, BanditInstance, true_gaps
from .confidence import lower_bound_report, problem_complexity, upper_bound_report
from .config import instance_section, load_config
from .datasets import pkis2_means, rating_means, read_rows
from .exceptions import ConfigError, InfeasibleError
from .harness import run_experiment, run_trial, single_row_table, sweep

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_MISSING = 2
EXIT_CONFIG = 3
EXIT_INFEASIBLE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _error_line(EXIT_MISSING, "UsageError", message)
        sys.exit(EXIT_MISSING)


def _error_line(code, kind, message):
    print(f"error code={code} kind={kind} message={json.dumps(str(message))}", file=sys.stderr)


def _overrides(args) -> dict:
    return {
        "delta": getattr(args, "delta", None),
        "epsilon": getattr(args, "epsilon", None),
        "trials": getattr(args, "trials", None),
        "seed": getattr(args, "seed", None),
        "policy": getattr(args, "policy", None),
        "radius_mode": getattr(args, "radius_mode", None),
        "out": getattr(args, "out", None),
        "alpha": getattr(args, "alpha", None),
        "workers": getattr(args, "workers", None),
        "trace": getattr(args, "trace", None),
        "max_rounds": getattr(args, "max_rounds", None),
    }


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _warn_truncated(n):
    if n:
        print(f"warning truncated={n} message=\"trials hit max_rounds before stopping\"", file=sys.stderr)


def cmd_run(args) -> int:
    settings = load_config(args.config, _overrides(args))
    cfg = settings.config
    summary = run_experiment(cfg, settings.workers)
    table = single_row_table(cfg, summary)
    text = table.to_csv()
    sys.stdout.write(text)
    if cfg.output:
        _write(cfg.output, text)
    if cfg.trace:
        _write(cfg.trace, "".join(r.to_json() + "\n" for r in summary.results))
    _warn_truncated(summary.truncated)
    return EXIT_OK


def cmd_sweep(args) -> int:
    settings = load_config(args.config, _overrides(args))
    cfg = settings.config
    param = args.param or settings.sweep_parameter or "delta"
    if args.grid:
        try:
            grid = [float(v) for v in args.grid.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--grid: expected comma-separated numbers, got {args.grid!r}") from None
    else:
        grid = list(settings.sweep_grid or ())
    truncated = []
    table = sweep(cfg, param, grid, settings.workers, on_point=lambda v, s: truncated.append(s.truncated))
    text = table.to_csv()
    sys.stdout.write(text)
    if cfg.output:
        _write(cfg.output, text)
    _warn_truncated(sum(truncated))
    return EXIT_OK


def cmd_ingest(args) -> int:
    if not os.path.exists(args.csv):
        raise FileNotFoundError(2, "no such file", args.csv)
    rows = read_rows(args.csv)
    if args.kind == "ratings":
        ids, means = rating_means(rows)
    else:
        ids, means = pkis2_means(rows)
    instance = BanditInstance(tuple(ArmDistribution.gaussian(m, args.sigma) for m in means), args.sigma)
    comment = f"ingested from {args.csv} ({args.kind}); arm order: " + ", ".join(ids)
    text = instance_section(instance, comment)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def _fmt(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return format(x, ".6g")


def cmd_complexity(args) -> int:
    settings = load_config(args.config, _overrides(args))
    cfg = settings.config
    inst = cfg.instance
    if inst.K < 2:
        raise ConfigError("complexity report needs at least two arms")
    mu = inst.means
    eps = cfg.contamination.assumed_epsilon
    sigma = inst.sigma_proxy
    c1 = args.c1 if args.c1 is not None else cfg.c1_uncertainty
    u = inst.uncertainty if inst.uncertainty is not None else (0.0,) * inst.K
    gaps = true_gaps(mu, u)
    H = problem_complexity(mu, u, sigma)
    lb = lower_bound_report(H, cfg.delta, eps, sigma, mu, c1)
    ub = upper_bound_report(mu, sigma, eps, cfg.delta, cfg.beta_exp, c1, u)
    out = []
    out.append("# resolved config: " + json.dumps(cfg.to_dict(), sort_keys=True))
    out.append(f"K = {inst.K}  sigma = {_fmt(sigma)}  epsilon = {_fmt(eps)}  delta = {_fmt(cfg.delta)}  "
               f"beta = {_fmt(cfg.beta_exp)}  c1 = {_fmt(c1)}")
    out.append("arm  mu           U            gap_i")
    for i in range(inst.K):
        out.append(f"{i:<4d} {_fmt(mu[i]):<12} {_fmt(u[i]):<12} {_fmt(gaps[i])}")
    out.append(f"H = sum_i (sqrt(2) sigma / max(gap_i, gap_b))^2 = {_fmt(H)}")
    out.append(f"lower_slope_pibai  lim E[tau]/ln(1/delta) >= H = {_fmt(lb.asymptotic_slope_pibai)}")
    out.append(f"lower_slope_cbai   (gaps reduced by c1 sigma eps sqrt(ln 1/eps) = {_fmt(lb.uncertainty)}) "
               f"= {_fmt(lb.asymptotic_slope_cbai)}")
    out.append(f"gap_upper_slope    max{{8K/eps^2, 64 beta H}} = {_fmt(ub.gap_slope)}")
    out.append(f"gap_upper_slope_proof_form  max{{8K/eps^2, 16 beta H/(1-eps)^2}} = {_fmt(ub.gap_slope_proof_form)}")
    out.append(f"gap_upper_slope_c1  max{{8K/eps^2, 64 beta H(gaps - 2 c1 sigma eps sqrt(ln 1/eps))}} = "
               f"{_fmt(ub.gap_slope_with_c1)}")
    out.append(f"se_upper_bound     max{{(8K/eps^2) ln(1/delta), sum_(i!=best) ln(K/(delta gap_i))/gap_i^2}} = "
               f"{_fmt(ub.se_bound)}  (terms: {_fmt(ub.se_contamination_term)}, {_fmt(ub.se_instance_term)}; "
               "constant of the instance term unspecified)")
    for note in ub.notes:
        out.append(f"note: {note}")
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def cmd_trial_trace(args) -> int:
    settings = load_config(args.config, _overrides(args))
    cfg = settings.config
    records = []
    result = run_trial(cfg, args.trial, trace=records.append)
    lines = [json.dumps(r) for r in records]
    lines.append(result.to_json())
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    _warn_truncated(int(result.truncated))
    return EXIT_OK


def _add_overrides(p, run_like=True):
    p.add_argument("config", help="experiment configuration file (INI)")
    p.add_argument("--delta", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--policy", choices=("gcbai", "secbai", "median_se", "random_gap"))
    p.add_argument("--radius-mode", dest="radius_mode", choices=("theorem", "empirical"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    if run_like:
        p.add_argument("--trials", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--max-rounds", dest="max_rounds", type=int)
        p.add_argument("--out", help="write the CSV here as well as to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cbai", description="Best-arm identification under reward contamination")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one experiment and print a CSV row")
    _add_overrides(p)
    p.add_argument("--trace", help="write per-trial JSON lines here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep delta or epsilon and print a CSV table")
    _add_overrides(p)
    p.add_argument("--param", choices=("delta", "epsilon"))
    p.add_argument("--grid", help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ingest", help="build an [instance] section from a dataset export")
    p.add_argument("kind", choices=("ratings", "pkis2"))
    p.add_argument("csv")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("complexity", help="print gaps, H and the bound formulas")
    _add_overrides(p, run_like=False)
    p.add_argument("--c1", type=float)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("trial-trace", help="per-pull JSON lines for one trial")
    _add_overrides(p, run_like=False)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--max-rounds", dest="max_rounds", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trial_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _error_line(EXIT_MISSING, "FileNotFoundError", exc.filename or exc)
        return EXIT_MISSING
    except InfeasibleError as exc:
        _error_line(EXIT_INFEASIBLE, type(exc).__name__, exc)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        _error_line(EXIT_CONFIG, type(exc).__name__, exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
