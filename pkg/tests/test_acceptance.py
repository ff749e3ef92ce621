"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Every tolerance is
exact (zero) unless stated; time budgets are asserted alongside the
functional checks.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import replace
from itertools import permutations
from pathlib import Path

import pytest

from textsynth.bench import TIMING_COLUMNS, run_suite
from textsynth.dsl import CPos, Concat, SubStr, size
from textsynth.pipeline import PipelineConfig, run_ablation, run_pipeline
from textsynth.rankers import INTENT, PERF, SIZE
from textsynth.rewrite import EquivSpec, enumerative_synth, shipped_rules
from textsynth.sexpr import serialize
from textsynth.synthesis import ExampleSet, SynthConfig, synthesize
from textsynth.tasks import load_suite

import oracles
from conftest import GOLDEN_DIR, TASKS_DIR, evaluable_corpus, random_program
from test_synthesis import SHRUNKEN, _random_instance


def _report(name: str, started: float, budget_s: float, detail: str = "") -> None:
    elapsed = time.perf_counter() - started
    suffix = f" [{detail}]" if detail else ""
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.1f}s / budget {budget_s:.0f}s){suffix}")
    assert elapsed < budget_s, f"{name} exceeded its {budget_s}s budget ({elapsed:.1f}s)"


@pytest.fixture(scope="module")
def bundled_tasks():
    tasks = load_suite(TASKS_DIR)
    assert len(tasks) >= 25
    return tasks


def _random_pipeline_task(seed: int):
    rng = random.Random(seed)
    program = random_program(rng, max_parts=3)
    corpus = evaluable_corpus(rng, program, want=6, attempts=80, max_len=8)
    if corpus is None or len(set(corpus)) < 2:
        return None
    corpus = list(dict.fromkeys(corpus))
    from textsynth.dsl import evaluate

    seeds = tuple((text, evaluate(program, text)) for text in corpus[: rng.choice((1, 2))])
    return ExampleSet(seeds), corpus


def test_soundness_suite(bundled_tasks):
    """Every recorded program satisfies the equivalence spec exactly."""
    started = time.perf_counter()
    checked_programs = 0

    for task in bundled_tasks:
        for objective in ("size", "perf"):
            cfg = PipelineConfig(objective=objective)
            full = run_pipeline(task.examples, task.corpus, cfg)
            skip2 = run_ablation(task.examples, task.corpus, replace(cfg, ablation="skip2"))
            for name, program in {**full.recorded_programs(), **skip2.recorded_programs()}.items():
                assert full.equiv.satisfied_by(program) or skip2.equiv.satisfied_by(program), (
                    task.name,
                    objective,
                    name,
                )
                checked_programs += 1

    produced = 0
    seed = 0
    cfg_small = SynthConfig(max_concat_parts=3)
    from textsynth.sampling import InputCorpus

    while produced < 200:
        seed += 1
        instance = _random_pipeline_task(seed)
        if instance is None:
            continue
        seeds, corpus = instance
        objective = "perf" if produced % 2 else "size"
        cfg = PipelineConfig(objective=objective, sample_n=6, synth=cfg_small)
        full = run_pipeline(seeds, InputCorpus(tuple(corpus)), cfg)
        skip2 = run_ablation(seeds, InputCorpus(tuple(corpus)), replace(cfg, ablation="skip2"))
        for name, program in full.recorded_programs().items():
            assert full.equiv.satisfied_by(program), (seed, name)
            checked_programs += 1
        assert skip2.equiv.satisfied_by(skip2.p13), seed
        checked_programs += 1
        produced += 1

    _report("soundness-suite", started, 120.0, f"{checked_programs} programs checked")


def test_optimality_oracle():
    """Top result rank equals brute-force max rank on shrunken instances."""
    started = time.perf_counter()
    rankers = (SIZE, PERF, INTENT)
    for seed in range(200):
        pairs = _random_instance(seed)
        ranker = rankers[seed % 3]
        results = synthesize(ExampleSet(pairs), ranker, SHRUNKEN)
        best_rank, _ = oracles.best_rank_oracle(pairs, SHRUNKEN, ranker)
        assert results and best_rank is not None, (seed, pairs)
        assert ranker.score(results[0]) == best_rank, (seed, pairs, serialize(results[0]))
    _report("optimality-oracle", started, 300.0, "200 instances")


def test_monotone_improvement(bundled_tasks):
    """rank_c(p123) >= rank_c(p12) >= rank_c(p1) for every task and objective."""
    started = time.perf_counter()
    for task in bundled_tasks:
        for objective in ("size", "perf"):
            result = run_pipeline(task.examples, task.corpus, PipelineConfig(objective=objective))
            assert result.o123 >= result.o12 >= result.o1, (task.name, objective)
    _report("monotone-improvement", started, 120.0, f"{len(bundled_tasks)}x2 runs")


def test_motivating_example_reproduction():
    """Uniform 10-row corpus, perf objective: constant slicing at [15, 25)."""
    started = time.perf_counter()
    task = next(t for t in load_suite(TASKS_DIR) if t.name == "second_date")
    assert len(task.corpus.inputs) == 10
    result = run_pipeline(task.examples, task.corpus, PipelineConfig(objective="perf"))
    assert result.p123 == Concat((SubStr(CPos(15), CPos(25)),))
    golden = (GOLDEN_DIR / "slice_15_25.py").read_bytes()
    assert result.emitted.text.encode("utf-8") == golden
    _report("motivating-example", started, 5.0)


def test_rewrite_termination_and_confluence(rng):
    """Greedy bounded by size(p)*|RR|; {R1, R4} is order-insensitive."""
    started = time.perf_counter()
    rules = shipped_rules()

    checked = 0
    while checked < 500:
        program = random_program(rng)
        corpus = evaluable_corpus(rng, program, want=2)
        if corpus is None:
            continue
        equiv = EquivSpec.from_program(program, corpus)
        result = enumerative_synth(equiv, PERF, program, budget=0)
        assert result.greedy_applications <= size(program) * len(rules)
        checked += 1

    subset = [r for r in rules if r.id in ("rpos_to_cpos", "const_fold")]
    confluent_checked = 0
    while confluent_checked < 100:
        program = random_program(rng)
        found = evaluable_corpus(rng, program, want=1, max_len=6)
        if found is None:
            continue
        equiv = EquivSpec.from_program(program, found * 2)
        ranks = {
            PERF.score(
                enumerative_synth(equiv, PERF, program, rules=list(order), budget=0).program
            )
            for order in permutations(subset)
        }
        assert len(ranks) == 1, serialize(program)
        confluent_checked += 1

    _report("rewrite-termination-confluence", started, 120.0,
            f"{checked} greedy + {confluent_checked} permutation checks")


def test_ablation_directions(bundled_tasks):
    """Enough fixtures exhibit each measured direction; fractions reported."""
    started = time.perf_counter()
    e_dir, o13_dir, o12_dir = set(), set(), set()
    total = 0
    for task in bundled_tasks:
        for objective in ("size", "perf"):
            cfg = PipelineConfig(objective=objective)
            full = run_pipeline(task.examples, task.corpus, cfg)
            skip2 = run_ablation(task.examples, task.corpus, replace(cfg, ablation="skip2"))
            conv = run_ablation(
                task.examples, task.corpus, replace(cfg, ablation="skip1"), reference=task.reference
            )
            total += 1
            if conv.e2 > conv.e1:
                e_dir.add(task.name)
            if full.o123 > skip2.o13:
                o13_dir.add(task.name)
            if full.o123 > full.o12:
                o12_dir.add(task.name)
    assert len(e_dir) >= 3, e_dir
    assert len(o13_dir) >= 3, o13_dir
    assert len(o12_dir) >= 3, o12_dir
    detail = (
        f"e2>e1 in {len(e_dir)}/{len(bundled_tasks)} tasks, "
        f"o123>o13 in {len(o13_dir)}, o123>o12 in {len(o12_dir)}"
    )
    _report("ablation-directions", started, 180.0, detail)


def test_determinism_of_suite_runs(bundled_tasks, tmp_path):
    """Identical metrics CSVs across runs, timing columns aside."""
    started = time.perf_counter()
    paths = []
    for run in (1, 2):
        metrics = tmp_path / f"metrics{run}.csv"
        run_suite(bundled_tasks, PipelineConfig(), metrics_path=metrics,
                  objectives=("size", "perf"))
        paths.append(metrics)

    def stable(path: Path):
        with path.open() as handle:
            rows = list(csv.reader(handle))
        keep = [i for i, name in enumerate(rows[0]) if name not in TIMING_COLUMNS]
        return [[row[i] for i in keep] for row in rows]

    assert stable(paths[0]) == stable(paths[1])
    _report("determinism", started, 120.0,
            f"{len(bundled_tasks)} tasks x 2 objectives x 2 runs")
