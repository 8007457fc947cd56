"""Experiment orchestration: batch runs, sensitivity sweeps, CSV/JSON output.

A run cell is one (problem, algorithm) pair. Multipopulation algorithms get
``runs`` seeded executions; canonical DE gets ``runs * subpops`` executions
whose consecutive groups are merged for comparison, since one
multipopulation run performs ``subpops`` parallel searches. Seeds derive as
``master + run_index`` so any single run can be reproduced from the report.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .benchmarks import BenchmarkProblem, get_problem, list_problems
from .core import run_de
from .errors import ConfigurationError
from .metrics import AggregateStats, aggregate, group_de_runs, match_minimizers
from .multipop import MultiParams, run_dewi, run_mde_itmf, without_switch_tol

ALGORITHMS = ("de", "mde-itmf", "dewi")

# CLI/config override keys -> where they land in the parameter bundle.
OVERRIDABLE_KEYS = ("np", "f", "cr", "gmax", "eps", "nsp", "beta", "rho", "tol")
SWEEPABLE_KEYS = ("np", "f", "cr", "rho", "beta", "eps", "tol", "nsp")
_INT_KEYS = {"np", "gmax", "nsp"}

METRICS = ("elapsed_seconds", "nfe", "ngp")

RUNS_CSV_HEADER = ["algorithm", "problem", "seed", "elapsed_seconds", "nfe", "ngp",
                   "generations", "best_points"]
AGGREGATES_CSV_HEADER = ["algorithm", "problem", "metric", "mean", "stddev", "cv_percent"]
SWEEP_CSV_HEADER = ["parameter", "value"] + AGGREGATES_CSV_HEADER
TRACE_CSV_HEADER = ["algorithm", "problem", "seed", "generation", "subpop",
                    "best_x", "best_y", "best_f", "spreading"]


@dataclass
class ExperimentConfig:
    """What to run: problems x algorithms x seeded repetitions."""

    problems: list[str]
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    runs: int = 100
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    out_dir: Optional[str] = None
    parallel: bool = False
    trace: bool = False

    def __post_init__(self):
        if not self.problems:
            raise ConfigurationError("config needs at least one problem")
        if not self.algorithms:
            raise ConfigurationError("config needs at least one algorithm")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ConfigurationError(
                    f"unknown algorithm {algo!r}; expected one of {', '.join(ALGORITHMS)}"
                )
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        bad = sorted(set(self.overrides) - set(OVERRIDABLE_KEYS))
        if bad:
            raise ConfigurationError(
                f"unknown parameter override(s) {bad}; expected keys from {OVERRIDABLE_KEYS}"
            )
        self.overrides = {k: float(v) for k, v in self.overrides.items()}


@dataclass
class SweepConfig:
    """One-at-a-time sensitivity sweep over a single control parameter."""

    base: ExperimentConfig
    parameter: str
    values: list[float]
    runs_per_value: int = 30

    def __post_init__(self):
        if self.parameter not in SWEEPABLE_KEYS:
            raise ConfigurationError(
                f"cannot sweep {self.parameter!r}; expected one of {SWEEPABLE_KEYS}"
            )
        if not self.values:
            raise ConfigurationError("sweep needs at least one value")
        if self.runs_per_value < 1:
            raise ConfigurationError("runs_per_value must be >= 1")


def apply_overrides(params: MultiParams, overrides: dict) -> MultiParams:
    """Apply normalized override keys to a parameter bundle, re-validating."""
    de_kw = {}
    if "np" in overrides:
        de_kw["pop_size"] = int(overrides["np"])
    if "f" in overrides:
        de_kw["F"] = overrides["f"]
    if "cr" in overrides:
        de_kw["CR"] = overrides["cr"]
    if "gmax" in overrides:
        de_kw["max_generations"] = int(overrides["gmax"])
    if "eps" in overrides:
        de_kw["spread_tol"] = overrides["eps"]
    de = replace(params.de, **de_kw) if de_kw else params.de
    penalty = params.penalty
    pen_kw = {}
    if "beta" in overrides:
        pen_kw["magnitude"] = overrides["beta"]
    if "rho" in overrides:
        pen_kw["radius"] = overrides["rho"]
    if pen_kw:
        if penalty is None:
            raise ConfigurationError("cannot override penalty parameters: none configured")
        penalty = replace(penalty, **pen_kw)
    return replace(
        params,
        de=de,
        penalty=penalty,
        subpops=int(overrides.get("nsp", params.subpops)),
        switch_tol=overrides.get("tol", params.switch_tol),
    )


def _single_run(problem_id: str, algorithm: str, seed: int, overrides: dict, trace: bool):
    """Execute one seeded run and score it against the problem's minimizers."""
    problem = get_problem(problem_id)
    params = apply_overrides(problem.default_params, overrides)
    if algorithm == "de":
        record = run_de(problem.objective, problem.bounds, params.de, seed,
                        collect_trace=trace)
    elif algorithm == "mde-itmf":
        record = run_mde_itmf(problem.objective, problem.bounds,
                              without_switch_tol(params), seed, collect_trace=trace)
    elif algorithm == "dewi":
        record = run_dewi(problem.objective, problem.bounds, params, seed,
                          collect_trace=trace)
    else:
        raise ConfigurationError(f"unknown algorithm {algorithm!r}")
    record.problem = problem.pid
    record.matched_minimizers = match_minimizers(record.final_bests, problem)
    return record


def _run_job(args):
    problem_id, algorithm, seed, overrides, trace = args
    try:
        return ("ok", _single_run(problem_id, algorithm, seed, overrides, trace))
    except Exception as err:  # run errors are recorded, the experiment continues
        return ("error", {"problem": problem_id, "algorithm": algorithm,
                          "seed": seed, "error": f"{type(err).__name__}: {err}"})


@dataclass
class CellResult:
    """Outcome of one (problem, algorithm) cell."""

    problem: str
    algorithm: str
    records: list
    groups: Optional[list] = None
    aggregates: Optional[dict] = None


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    cells: list[CellResult]
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list  # (value, ExperimentReport) pairs in sweep order

    @property
    def ok(self) -> bool:
        return all(report.ok for _, report in self.rows)


def _cell_aggregates(units) -> Optional[dict]:
    if len(units) < 2:
        return None
    return {
        "elapsed_seconds": aggregate([u.elapsed_seconds for u in units]),
        "nfe": aggregate([u.nfe for u in units]),
        "ngp": aggregate([len(u.matched_minimizers) for u in units]),
    }


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every cell of the configured experiment and assemble the report.

    Individual run errors are recorded as failures and the experiment
    continues; the report's ``ok`` flag (and the CLI exit code) reflect
    them. With ``parallel`` set, runs execute across worker processes;
    results are assembled in run-index order either way, so everything but
    the elapsed-time fields is identical to a sequential execution.
    """
    cell_specs = []
    for pid in config.problems:
        problem = get_problem(pid)
        # Type-check overrides against every problem row before any run starts.
        params = apply_overrides(problem.default_params, config.overrides)
        for algo in config.algorithms:
            n = config.runs * params.subpops if algo == "de" else config.runs
            cell_specs.append((problem, algo, n))

    jobs = []
    for problem, algo, n in cell_specs:
        for i in range(n):
            jobs.append((problem.pid, algo, config.seed + i, config.overrides, config.trace))

    if config.parallel:
        with ProcessPoolExecutor() as pool:
            outcomes = list(pool.map(_run_job, jobs, chunksize=1))
    else:
        outcomes = [_run_job(job) for job in jobs]

    cells = []
    failures = []
    cursor = 0
    for problem, algo, n in cell_specs:
        records = []
        cell_failed = False
        for status, payload in outcomes[cursor:cursor + n]:
            if status == "ok":
                records.append(payload)
            else:
                failures.append(payload)
                cell_failed = True
        cursor += n
        groups = None
        if algo == "de":
            params = apply_overrides(problem.default_params, config.overrides)
            if not cell_failed and params.subpops > 0:
                groups = group_de_runs(records, params.subpops)
                for g in groups:
                    g.matched_minimizers = match_minimizers(g.final_bests, problem)
        units = groups if groups is not None else records
        aggregates = None if cell_failed else _cell_aggregates(units, problem)
        cells.append(CellResult(problem=problem.pid, algorithm=algo,
                                records=records, groups=groups, aggregates=aggregates))
    return ExperimentReport(config=config, cells=cells, failures=failures)


def run_sweep(config: SweepConfig) -> SweepReport:
    """Re-run the base experiment once per swept value and tabulate."""
    rows = []
    for value in config.values:
        cfg = replace(
            config.base,
            runs=config.runs_per_value,
            overrides={**config.base.overrides, config.parameter: value},
        )
        rows.append((value, run_experiment(cfg)))
    return SweepReport(config=config, rows=rows)


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "problems": list(config.problems),
        "algorithms": list(config.algorithms),
        "runs": config.runs,
        "seed": config.seed,
        "overrides": dict(config.overrides),
        "out_dir": config.out_dir,
        "parallel": config.parallel,
        "trace": config.trace,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Rebuild a config from its JSON form (accepts a whole report too)."""
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    known = {"problems", "algorithms", "runs", "seed", "overrides", "out_dir",
             "parallel", "trace"}
    kwargs = {k: v for k, v in data.items() if k in known}
    return ExperimentConfig(**kwargs)


def _sig17(x: float) -> str:
    return f"{float(x):.17g}"


def _best_points_field(record) -> str:
    triples = []
    for p in record.final_bests:
        parts = [_sig17(c) for c in p.coords] + [_sig17(p.fitness)]
        triples.append(",".join(parts))
    return ";".join(triples)


def _record_row(record) -> list:
    return [
        record.algorithm,
        record.problem,
        record.seed,
        repr(float(record.elapsed_seconds)),
        record.nfe,
        len(record.matched_minimizers),
        ";".join(str(g) for g in record.generations_used),
        _best_points_field(record),
    ]


def _aggregate_rows(cell) -> list[list]:
    rows = []
    for metric in METRICS:
        stats = None if cell.aggregates is None else cell.aggregates.get(metric)
        if stats is None:
            rows.append([cell.algorithm, cell.problem, metric, "", "", ""])
        else:
            cv = "" if stats.cv_percent is None else repr(stats.cv_percent)
            rows.append([cell.algorithm, cell.problem, metric,
                         repr(stats.mean), repr(stats.stddev), cv])
    return rows


def _record_dict(record) -> dict:
    return {
        "algorithm": record.algorithm,
        "problem": record.problem,
        "seed": record.seed,
        "elapsed_seconds": float(record.elapsed_seconds),
        "nfe": int(record.nfe),
        "ngp": len(record.matched_minimizers),
        "generations_used": [int(g) for g in record.generations_used],
        "final_bests": [
            [float(c) for c in p.coords] + [float(p.fitness)] for p in record.final_bests
        ],
        "matched_minimizers": sorted(record.matched_minimizers),
    }


def _stats_dict(stats: Optional[AggregateStats]) -> Optional[dict]:
    if stats is None:
        return None
    return {"mean": stats.mean, "stddev": stats.stddev, "cv_percent": stats.cv_percent}


def _cell_dict(cell: CellResult) -> dict:
    return {
        "problem": cell.problem,
        "algorithm": cell.algorithm,
        "runs": [_record_dict(r) for r in cell.records],
        "groups": None if cell.groups is None else [_record_dict(g) for g in cell.groups],
        "aggregates": None if cell.aggregates is None else {
            metric: _stats_dict(cell.aggregates[metric]) for metric in METRICS
        },
    }


def _problem_provenance(pids) -> dict:
    table = {}
    for p in list_problems():
        if p.pid in pids:
            table[p.pid] = {"name": p.name, "formula": p.formula}
    return table


def experiment_report_dict(report: ExperimentReport) -> dict:
    pids = {get_problem(p).pid for p in report.config.problems}
    return {
        "config": config_to_dict(report.config),
        "cells": [_cell_dict(c) for c in report.cells],
        "failures": report.failures,
        "problems": _problem_provenance(pids),
    }


def sweep_report_dict(report: SweepReport) -> dict:
    rows = []
    for value, exp in report.rows:
        rows.append({
            "value": value,
            "cells": [
                {
                    "problem": c.problem,
                    "algorithm": c.algorithm,
                    "aggregates": None if c.aggregates is None else {
                        metric: _stats_dict(c.aggregates[metric]) for metric in METRICS
                    },
                }
                for c in exp.cells
            ],
            "failures": exp.failures,
        })
    pids = {get_problem(p).pid for p in report.config.base.problems}
    return {
        "config": {
            "base": config_to_dict(report.config.base),
            "parameter": report.config.parameter,
            "values": list(report.config.values),
            "runs_per_value": report.config.runs_per_value,
        },
        "rows": rows,
        "problems": _problem_provenance(pids),
    }


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit_outputs(report, out_dir) -> list[Path]:
    """Write a report's files into ``out_dir`` and return the paths.

    Experiment reports produce ``runs.csv`` (one row per executed run),
    ``aggregates.csv`` (one row per cell and metric), ``report.json``, and
    ``trace.csv`` when any run carried a per-generation trace. Sweep
    reports produce ``sweep.csv`` and ``report.json``. Re-running with the
    same master seed reproduces every file byte for byte except the
    elapsed-time fields.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if isinstance(report, SweepReport):
        rows = []
        for value, exp in report.rows:
            for cell in exp.cells:
                for agg_row in _aggregate_rows(cell):
                    rows.append([report.config.parameter, repr(float(value))] + agg_row)
        path = out / "sweep.csv"
        _write_csv(path, SWEEP_CSV_HEADER, rows)
        written.append(path)
        path = out / "report.json"
        with open(path, "w") as fh:
            json.dump(sweep_report_dict(report), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
        return written

    run_rows = [_record_row(r) for cell in report.cells for r in cell.records]
    path = out / "runs.csv"
    _write_csv(path, RUNS_CSV_HEADER, run_rows)
    written.append(path)

    agg_rows = [row for cell in report.cells for row in _aggregate_rows(cell)]
    path = out / "aggregates.csv"
    _write_csv(path, AGGREGATES_CSV_HEADER, agg_rows)
    written.append(path)

    path = out / "report.json"
    with open(path, "w") as fh:
        json.dump(experiment_report_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)

    trace_rows = []
    for cell in report.cells:
        for record in cell.records:
            if not record.trace:
                continue
            for row in record.trace:
                gen, subpop = row[0], row[1]
                coords = row[2:-2]
                best_f, spreading = row[-2], row[-1]
                trace_rows.append(
                    [record.algorithm, record.problem, record.seed, gen, subpop]
                    + [_sig17(c) for c in coords]
                    + [_sig17(best_f), _sig17(spreading)]
                )
    if trace_rows:
        path = out / "trace.csv"
        _write_csv(path, TRACE_CSV_HEADER, trace_rows)
        written.append(path)
    return written
