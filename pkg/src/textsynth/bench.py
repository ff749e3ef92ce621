"""Suite runner: per-task metrics, emitted programs, and aggregates.

One metrics row is produced per task per objective.  A task failure marks
its row (metric cells stay empty) without aborting the rest of the suite.
The CSV schema is fixed; two runs with the same configuration produce
identical files except for the timing-derived columns.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .codegen import translate
from .pipeline import PipelineConfig, RunResult, run_ablation, run_pipeline
from .sexpr import serialize
from .tasks import BenchmarkTask

__all__ = [
    "CSV_COLUMNS",
    "TIMING_COLUMNS",
    "MetricsRow",
    "SuiteResult",
    "run_task",
    "run_suite",
    "write_metrics",
    "geometric_mean",
]

CSV_COLUMNS = (
    "task",
    "objective",
    "e1",
    "e2",
    "o1",
    "o12",
    "o13",
    "o123",
    "improvement_ratio",
    "t_pbe_ms",
    "t_opt_ms",
    "overhead_ratio",
)

TIMING_COLUMNS = ("t_pbe_ms", "t_opt_ms", "overhead_ratio")


@dataclass
class MetricsRow:
    task: str
    objective: str
    e1: int | None = None
    e2: int | None = None
    o1: Fraction | None = None
    o12: Fraction | None = None
    o13: Fraction | None = None
    o123: Fraction | None = None
    improvement_ratio: Fraction | None = None
    t_pbe_ms: float | None = None
    t_opt_ms: float | None = None
    overhead_ratio: float | None = None
    error: str | None = None

    def csv_cells(self) -> list[str]:
        def fmt(value) -> str:
            if value is None:
                return ""
            if isinstance(value, Fraction):
                return repr(float(value))
            if isinstance(value, float):
                return f"{value:.3f}"
            return str(value)

        return [fmt(getattr(self, name)) for name in CSV_COLUMNS]


@dataclass
class TaskArtifacts:
    """Everything worth persisting from one task run."""

    row: MetricsRow
    programs: dict[str, str] = field(default_factory=dict)  # label -> program text
    emitted: dict[str, str] = field(default_factory=dict)  # label -> python source
    trace: tuple = ()


def _median_timings(task: BenchmarkTask, cfg: PipelineConfig, repeat: int, result: RunResult):
    if repeat <= 1:
        return result.t_pbe_ms, result.t_opt_ms
    pbe = [result.t_pbe_ms]
    opt = [result.t_opt_ms]
    for _ in range(repeat - 1):
        again = run_pipeline(task.examples, task.corpus, cfg)
        pbe.append(again.t_pbe_ms)
        opt.append(again.t_opt_ms)
    return statistics.median(pbe), statistics.median(opt)


def run_task(task: BenchmarkTask, base: PipelineConfig, objective: str, repeat: int = 1) -> TaskArtifacts:
    """Full pipeline plus the ablations needed to fill one metrics row."""
    cfg = replace(base, objective=objective, phase2_top_k=None, ablation="none")
    row = MetricsRow(task=task.name, objective=objective)
    try:
        full = run_pipeline(task.examples, task.corpus, cfg)
        skip2 = run_ablation(task.examples, task.corpus, replace(cfg, ablation="skip2"))
        converge = run_ablation(
            task.examples,
            task.corpus,
            replace(cfg, ablation="skip1"),
            reference=task.reference,
        )
    except Exception as exc:  # record the failure, keep the suite going
        row.error = f"{type(exc).__name__}: {exc}"
        return TaskArtifacts(row=row)

    row.e1 = converge.e1
    row.e2 = converge.e2
    row.o1 = full.o1
    row.o12 = full.o12
    row.o13 = skip2.o13
    row.o123 = full.o123
    row.improvement_ratio = (-full.o1) / (-full.o123)
    t_pbe, t_opt = _median_timings(task, cfg, repeat, full)
    row.t_pbe_ms = t_pbe
    row.t_opt_ms = t_opt
    row.overhead_ratio = t_opt / t_pbe if t_pbe else float("inf")

    artifacts = TaskArtifacts(row=row, trace=full.steps)
    artifacts.programs["p1"] = serialize(full.p1)
    artifacts.programs["p12"] = serialize(full.p12)
    artifacts.programs["p13"] = serialize(skip2.p13)
    artifacts.programs["p123"] = serialize(full.p123)
    artifacts.emitted["p1"] = translate(full.p1).text
    artifacts.emitted["p12"] = translate(full.p12).text
    artifacts.emitted["p123"] = full.emitted.text
    return artifacts


@dataclass
class SuiteResult:
    rows: list[MetricsRow]
    aggregates: dict[str, dict[str, float]]

    def aggregate_lines(self) -> list[str]:
        lines = []
        for objective in sorted(self.aggregates):
            agg = self.aggregates[objective]
            lines.append(
                f"aggregate objective={objective} tasks={agg['tasks']:.0f} "
                f"median_improvement={agg['median_improvement']:.4f} "
                f"geomean_improvement={agg['geomean_improvement']:.4f}"
            )
        return lines


def geometric_mean(values: list[float]) -> float:
    if not values:
        raise ValueError("geometric mean of no values")
    return math.exp(sum(math.log(v) for v in values) / len(values))


def aggregate_rows(rows: list[MetricsRow]) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    for objective in sorted({r.objective for r in rows}):
        ratios = [
            float(r.improvement_ratio)
            for r in rows
            if r.objective == objective and r.improvement_ratio is not None
        ]
        if not ratios:
            continue
        out[objective] = {
            "tasks": float(len(ratios)),
            "median_improvement": statistics.median(ratios),
            "geomean_improvement": geometric_mean(ratios),
        }
    return out


def write_metrics(rows: list[MetricsRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_cells())


def _run_unit(args) -> TaskArtifacts:
    task, base, objective, repeat = args
    return run_task(task, base, objective, repeat)


def run_suite(
    tasks: list[BenchmarkTask],
    base: PipelineConfig,
    out_dir: str | Path | None = None,
    metrics_path: str | Path | None = None,
    objectives: tuple[str, ...] = ("size", "perf"),
    jobs: int = 1,
    repeat: int = 1,
) -> SuiteResult:
    """Run every task under every objective; persist metrics and programs."""
    units = [(task, base, objective, repeat) for task in tasks for objective in objectives]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            artifacts = list(pool.map(_run_unit, units))
    else:
        artifacts = [_run_unit(u) for u in units]

    rows = [a.row for a in artifacts]
    for row in rows:
        if row.error:
            print(f"task {row.task} [{row.objective}] failed: {row.error}", file=sys.stderr)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for art in artifacts:
            stem = f"{art.row.task}__{art.row.objective}"
            for label, text in art.emitted.items():
                (out_dir / f"{stem}__{label}.py").write_text(text, encoding="utf-8")
            for label, text in art.programs.items():
                (out_dir / f"{stem}__{label}.sexp").write_text(text + "\n", encoding="utf-8")

    if metrics_path is not None:
        write_metrics(rows, metrics_path)

    result = SuiteResult(rows=rows, aggregates=aggregate_rows(rows))
    if metrics_path is not None:
        sidecar = Path(metrics_path).with_suffix(".aggregate.json")
        sidecar.write_text(json.dumps(result.aggregates, indent=2, sort_keys=True) + "\n")
    return result
