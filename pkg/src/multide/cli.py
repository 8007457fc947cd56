"""Command-line interface: run experiments, sweeps, listings, and traces."""

from __future__ import annotations

import argparse
import json
import sys

from .benchmarks import list_problems
from .errors import ConfigurationError
from .harness import (
    ALGORITHMS,
    ExperimentConfig,
    SweepConfig,
    emit_outputs,
    run_experiment,
    run_sweep,
)


def _parse_params(items) -> dict:
    overrides = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--param expects key=value, got {item!r}")
        try:
            overrides[key.strip().lower()] = float(value)
        except ValueError:
            raise ConfigurationError(f"--param {key}: {value!r} is not a number") from None
    return overrides


def _parse_values(text) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigurationError(f"--values expects comma-separated numbers, got {text!r}") from None


def _build_config(args, default_runs: int) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        if isinstance(data.get("config"), dict):
            data = data["config"]
    overrides = dict(data.get("overrides", {}))
    overrides.update(_parse_params(getattr(args, "param", None)))
    return ExperimentConfig(
        problems=args.problem or data.get("problems") or [p.pid for p in list_problems()],
        algorithms=args.algo or data.get("algorithms") or list(ALGORITHMS),
        runs=args.runs if args.runs is not None else data.get("runs", default_runs),
        seed=args.seed if args.seed is not None else data.get("seed", 0),
        overrides=overrides,
        out_dir=args.out if args.out is not None else data.get("out_dir"),
        parallel=bool(getattr(args, "parallel", False) or data.get("parallel", False)),
        trace=bool(getattr(args, "trace", False) or data.get("trace", False)),
    )


def _fmt_stats(stats, digits=2):
    return "-" if stats is None else f"{stats.mean:.{digits}f}"


def _print_experiment(report):
    print(f"{'problem':<8} {'algorithm':<9} {'runs':>5} {'mean NGP':>9} "
          f"{'mean NFE':>12} {'mean ET(s)':>11}")
    for cell in report.cells:
        agg = cell.aggregates or {}
        print(f"{cell.problem:<8} {cell.algorithm:<9} {len(cell.records):>5} "
              f"{_fmt_stats(agg.get('ngp')):>9} {_fmt_stats(agg.get('nfe'), 1):>12} "
              f"{_fmt_stats(agg.get('elapsed_seconds'), 3):>11}")
    for failure in report.failures:
        print(f"FAILED {failure['problem']} {failure['algorithm']} "
              f"seed={failure['seed']}: {failure['error']}")


def _finish(report, out_dir) -> int:
    if out_dir:
        for path in emit_outputs(report, out_dir):
            print(f"wrote {path}")
    return 0 if report.ok else 1


def _cmd_run(args) -> int:
    config = _build_config(args, default_runs=100)
    report = run_experiment(config)
    _print_experiment(report)
    return _finish(report, config.out_dir)


def _cmd_sweep(args) -> int:
    base = _build_config(args, default_runs=30)
    sweep = SweepConfig(
        base=base,
        parameter=args.sweep_param,
        values=_parse_values(args.values),
        runs_per_value=base.runs,
    )
    report = run_sweep(sweep)
    for value, exp in report.rows:
        print(f"--- {sweep.parameter} = {value}")
        _print_experiment(exp)
    return _finish(report, base.out_dir)


def _cmd_list(args) -> int:
    print(f"{'id':<4} {'name':<20} {'minima':>6} {'domain':<26} "
          f"{'Np':>3} {'F':>4} {'CR':>4} {'Nsp':>3} {'beta':>6} {'rho':>5} {'tol':>7}")
    for p in list_problems():
        lo, hi = p.bounds.lower, p.bounds.upper
        domain = f"[{lo[0]:g},{hi[0]:g}]x[{lo[1]:g},{hi[1]:g}]"
        d, pen = p.default_params.de, p.default_params.penalty
        print(f"{p.pid:<4} {p.name:<20} {p.minimizer_count:>6} {domain:<26} "
              f"{d.pop_size:>3} {d.F:>4.2g} {d.CR:>4.2g} {p.default_params.subpops:>3} "
              f"{pen.magnitude:>6g} {pen.radius:>5g} {p.default_params.switch_tol:>7g}")
    return 0


def _cmd_trace(args) -> int:
    args.runs = 1
    args.parallel = False
    args.trace = True
    if not args.problem and not args.config:
        args.problem = ["B1"]
    if not args.algo and not args.config:
        args.algo = ["mde-itmf"]
    config = _build_config(args, default_runs=1)
    report = run_experiment(config)
    for cell in report.cells:
        for record in cell.records:
            bests = "; ".join(
                f"({p.coords[0]:.6g}, {p.coords[1]:.6g}) f={p.fitness:.6g}"
                for p in record.final_bests
            )
            print(f"{cell.problem} {cell.algorithm} seed={record.seed} "
                  f"nfe={record.nfe} generations={record.generations_used} bests: {bests}")
    return _finish(report, config.out_dir)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multide",
        description="Multimodal optimization benchmark harness "
                    "(canonical DE, MDE-ITMF, DEwI)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_trace=True):
        p.add_argument("--problem", action="append",
                       help="problem id or name (repeatable; default: all)")
        p.add_argument("--algo", action="append", choices=list(ALGORITHMS),
                       help="algorithm (repeatable; default: all)")
        p.add_argument("--runs", type=int, default=None, help="runs per cell")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        p.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="parameter override, keys: np f cr gmax eps nsp beta rho tol")
        p.add_argument("--out", default=None, metavar="DIR", help="output directory")
        p.add_argument("--config", default=None, metavar="FILE",
                       help="JSON config file (a report.json works too); flags win")
        p.add_argument("--parallel", action="store_true",
                       help="run seeded executions across worker processes")
        if with_trace:
            p.add_argument("--trace", action="store_true",
                           help="collect per-generation traces")

    p_run = sub.add_parser("run", help="run a seeded experiment")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="one-parameter sensitivity sweep")
    common(p_sweep, with_trace=False)
    p_sweep.add_argument("--sweep-param", required=True, metavar="KEY",
                         help="parameter to sweep: np f cr rho beta eps tol nsp")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values, e.g. 8,10,12,15")
    p_sweep.set_defaults(func=_cmd_sweep, trace=False)

    p_list = sub.add_parser("list", help="list problems and default parameters")
    p_list.set_defaults(func=_cmd_list)

    p_trace = sub.add_parser("trace", help="single seeded run with per-generation trace")
    common(p_trace, with_trace=False)
    p_trace.set_defaults(func=_cmd_trace)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
