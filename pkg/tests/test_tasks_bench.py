from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from textsynth.bench import (
    CSV_COLUMNS,
    TIMING_COLUMNS,
    aggregate_rows,
    geometric_mean,
    MetricsRow,
    run_suite,
    run_task,
    write_metrics,
)
from textsynth.pipeline import PipelineConfig
from textsynth.tasks import TaskError, load_suite, load_task

from conftest import TASKS_DIR


def _write_task(tmp_path: Path, name="demo", **overrides) -> Path:
    data = {
        "name": name,
        "objective": "perf",
        "examples": [{"in": "a1", "out": "1"}],
        "corpus": ["a1", "b2", "c3"],
        "reference": {"a1": "1", "b2": "2", "c3": "3"},
    }
    data.update(overrides)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_load_valid_task(tmp_path):
    task = load_task(_write_task(tmp_path))
    assert task.name == "demo"
    assert task.examples.pairs == (("a1", "1"),)
    assert len(task.corpus.inputs) == 3


def test_example_input_missing_from_corpus_is_rejected(tmp_path):
    path = _write_task(tmp_path, corpus=["b2", "c3"], reference=None)
    with pytest.raises(TaskError) as err:
        load_task(path)
    assert "examples" in str(err.value)


def test_empty_corpus_is_rejected(tmp_path):
    path = _write_task(tmp_path, corpus=[], reference=None)
    with pytest.raises(TaskError) as err:
        load_task(path)
    assert "corpus" in str(err.value)


def test_reference_must_cover_corpus_and_agree_with_seeds(tmp_path):
    path = _write_task(tmp_path, reference={"a1": "1", "b2": "2"})
    with pytest.raises(TaskError) as err:
        load_task(path)
    assert "reference" in str(err.value)

    path = _write_task(tmp_path, reference={"a1": "9", "b2": "2", "c3": "3"})
    with pytest.raises(TaskError):
        load_task(path)


def test_malformed_json_reports_path(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(TaskError) as err:
        load_task(path)
    assert "bad.json" in str(err.value)


def test_bundled_suite_loads():
    tasks = load_suite(TASKS_DIR)
    assert len(tasks) >= 25
    assert len({t.name for t in tasks}) == len(tasks)
    assert all(t.reference is not None for t in tasks)


def test_geometric_mean_example():
    assert geometric_mean([2.0, 8.0]) == pytest.approx(4.0)


def test_aggregate_rows_median_and_geomean():
    rows = [
        MetricsRow(task="a", objective="perf", improvement_ratio=2),
        MetricsRow(task="b", objective="perf", improvement_ratio=8),
        MetricsRow(task="c", objective="perf", error="boom"),
    ]
    agg = aggregate_rows(rows)
    assert agg["perf"]["tasks"] == 2
    assert agg["perf"]["median_improvement"] == pytest.approx(5.0)
    assert agg["perf"]["geomean_improvement"] == pytest.approx(4.0)


def test_run_task_fills_every_metric_column():
    task = load_task(TASKS_DIR / "second_date.json")
    artifacts = run_task(task, PipelineConfig(), "perf")
    row = artifacts.row
    assert row.error is None
    for column in CSV_COLUMNS:
        assert getattr(row, column) is not None, column
    assert row.improvement_ratio >= 1
    assert set(artifacts.emitted) == {"p1", "p12", "p123"}
    assert set(artifacts.programs) == {"p1", "p12", "p13", "p123"}


def test_suite_continues_past_failing_task(tmp_path, capsys):
    _write_task(tmp_path, name="good")
    _write_task(
        tmp_path,
        name="contradictory",
        examples=[{"in": "a1", "out": "x"}, {"in": "b2", "out": "y"}],
        corpus=["a1", "b2"],
        reference=None,
    )
    # same-input contradiction must fail phase 1 but not the suite
    bad = json.loads((tmp_path / "contradictory.json").read_text())
    bad["examples"] = [{"in": "a1", "out": "x"}, {"in": "b2", "out": "b2b2b2b2b2b2b2b2b2"}]
    (tmp_path / "contradictory.json").write_text(json.dumps(bad))

    tasks = load_suite(tmp_path)
    result = run_suite(
        tasks,
        PipelineConfig(),
        out_dir=tmp_path / "out",
        metrics_path=tmp_path / "metrics.csv",
        objectives=("perf",),
    )
    by_name = {r.task: r for r in result.rows}
    assert by_name["contradictory"].error is not None
    assert by_name["good"].error is None

    with (tmp_path / "metrics.csv").open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 3
    failed = next(r for r in rows[1:] if r[0] == "contradictory")
    assert all(cell == "" for cell in failed[2:])  # metrics empty, row flagged by absence


def test_metrics_csv_schema_and_determinism(tmp_path):
    tasks = [load_task(TASKS_DIR / "second_date.json"), load_task(TASKS_DIR / "iso_year.json")]
    paths = []
    for run in (1, 2):
        metrics = tmp_path / f"metrics{run}.csv"
        run_suite(tasks, PipelineConfig(), metrics_path=metrics, objectives=("size", "perf"))
        paths.append(metrics)

    def stable_cells(path):
        with path.open() as handle:
            rows = list(csv.reader(handle))
        header = rows[0]
        keep = [i for i, name in enumerate(header) if name not in TIMING_COLUMNS]
        return [[row[i] for i in keep] for row in rows]

    assert stable_cells(paths[0]) == stable_cells(paths[1])
    agg = json.loads(paths[0].with_suffix(".aggregate.json").read_text())
    assert set(agg) == {"size", "perf"}


def test_emitted_program_files_are_written(tmp_path):
    tasks = [load_task(TASKS_DIR / "second_date.json")]
    out = tmp_path / "out"
    run_suite(tasks, PipelineConfig(), out_dir=out, objectives=("perf",))
    names = sorted(p.name for p in out.iterdir())
    assert "second_date__perf__p123.py" in names
    assert "second_date__perf__p1.sexp" in names
    emitted = (out / "second_date__perf__p123.py").read_text(encoding="utf-8")
    assert "x[15:25]" in emitted


def test_parallel_jobs_produce_identical_rows(tmp_path):
    tasks = [load_task(TASKS_DIR / "iso_year.json"), load_task(TASKS_DIR / "clock_minutes.json")]
    serial = run_suite(tasks, PipelineConfig(), objectives=("perf",), jobs=1)
    parallel = run_suite(tasks, PipelineConfig(), objectives=("perf",), jobs=2)
    assert [r.task for r in serial.rows] == [r.task for r in parallel.rows]
    assert [r.o123 for r in serial.rows] == [r.o123 for r in parallel.rows]


def test_write_metrics_uses_fixed_column_order(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics([MetricsRow(task="t", objective="size")], path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
