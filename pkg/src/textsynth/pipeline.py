"""The three-phase optimizing synthesis pipeline.

Phase 1 disambiguates intent: a plain synthesis run over the user's
examples under the intent ranker, yielding p1.  Phase 2 is global search:
p1's behavior on a representative sample of the input corpus becomes an
equivalence specification, and synthesis re-runs against it under the cost
ranker, yielding p12 (and, for the size objective, a few runners-up).
Phase 3 is local search: guarded rewriting of each phase-2 candidate into
the extended DSL, keeping the best result, p123.

``t_pbe`` measures phase 1; ``t_opt`` measures everything after it,
including construction of the equivalence specification.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .codegen import EmittedSource, translate
from .dsl import Concat, EvalError, Node, evaluate, size
from .rankers import INTENT, Ranker, Weights, ranker_for_objective
from .rewrite import EquivSpec, RewriteResult, RewriteStep, enumerative_synth, shipped_rules
from .sampling import InputCorpus, representative_sample
from .sexpr import serialize
from .synthesis import ExampleSet, SynthConfig, synthesize

__all__ = [
    "PipelineConfig",
    "RunResult",
    "SynthesisFailure",
    "run_pipeline",
    "run_ablation",
    "converge_examples",
]


class SynthesisFailure(RuntimeError):
    """No program consistent with the given examples exists in the language."""


@dataclass(frozen=True)
class PipelineConfig:
    objective: str = "perf"
    sample_n: int = 20
    synth: SynthConfig = field(default_factory=SynthConfig)
    phase2_top_k: int | None = None  # defaults: 1 for perf, 5 for size
    rewrite_budget: int = 500
    ablation: str = "none"  # none | skip1 | skip2 | skip3
    weights: Weights | None = None

    def __post_init__(self) -> None:
        if self.objective not in ("size", "perf"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.ablation not in ("none", "skip1", "skip2", "skip3"):
            raise ValueError(f"unknown ablation mode {self.ablation!r}")

    @property
    def resolved_top_k(self) -> int:
        if self.phase2_top_k is not None:
            return self.phase2_top_k
        return 5 if self.objective == "size" else 1

    def cost_ranker(self) -> Ranker:
        return ranker_for_objective(self.objective, self.weights)


@dataclass
class RunResult:
    """Programs, objective scores, and measurements from one pipeline run.

    Objective values are ranker scores (negated costs), so larger is
    better; fields are None when the corresponding phase did not run.
    """

    objective: str
    p1: Node | None = None
    p12: Node | None = None
    p13: Node | None = None
    p123: Node | None = None
    o1: Fraction | None = None
    o12: Fraction | None = None
    o13: Fraction | None = None
    o123: Fraction | None = None
    e1: int | None = None
    e2: int | None = None
    t_pbe_ms: float | None = None
    t_opt_ms: float | None = None
    equiv: EquivSpec | None = None
    steps: tuple[RewriteStep, ...] = ()
    emitted: EmittedSource | None = None

    def recorded_programs(self) -> dict[str, Node]:
        out = {}
        for name in ("p1", "p12", "p13", "p123"):
            prog = getattr(self, name)
            if prog is not None:
                out[name] = prog
        return out


def _phase1(examples: ExampleSet, cfg: PipelineConfig) -> Node:
    results = synthesize(examples, INTENT, replace(cfg.synth, top_k=1))
    if not results:
        raise SynthesisFailure("no program is consistent with the given examples")
    return results[0]


def _build_equiv(p1: Node, corpus: InputCorpus, cfg: PipelineConfig) -> EquivSpec:
    sample = representative_sample(corpus, cfg.sample_n)
    return EquivSpec.from_program(p1, sample)


def _phase2(equiv: EquivSpec, cfg: PipelineConfig) -> list[Concat]:
    candidates = synthesize(
        ExampleSet(equiv.pairs),
        cfg.cost_ranker(),
        replace(cfg.synth, top_k=cfg.resolved_top_k),
    )
    if not candidates:
        # p1 itself satisfies the specification and lies within the same
        # bounds, so an empty phase 2 indicates an engine defect.
        raise AssertionError("global search found no candidate although p1 qualifies")
    return candidates


def _phase3(
    equiv: EquivSpec, candidates: list[Node], cfg: PipelineConfig
) -> tuple[Node, RewriteResult]:
    ranker = cfg.cost_ranker()
    rules = shipped_rules()
    best: tuple | None = None
    for candidate in candidates:
        result = enumerative_synth(equiv, ranker, candidate, rules, cfg.rewrite_budget)
        key = (ranker.cost(result.program), size(result.program), serialize(result.program))
        if best is None or key < best[0]:
            best = (key, result)
    assert best is not None
    return best[1].program, best[1]


def run_pipeline(examples: ExampleSet, corpus: InputCorpus, cfg: PipelineConfig) -> RunResult:
    """Full three-phase run; returns all programs, scores, and timings."""
    for text, _ in examples.pairs:
        if text not in corpus.inputs:
            raise ValueError(f"example input {text!r} does not appear in the corpus")
    ranker = cfg.cost_ranker()
    result = RunResult(objective=cfg.objective)

    t0 = time.perf_counter()
    p1 = _phase1(examples, cfg)
    result.t_pbe_ms = (time.perf_counter() - t0) * 1000.0
    result.p1 = p1
    result.o1 = ranker.score(p1)
    result.e1 = len(examples.pairs)

    t1 = time.perf_counter()
    equiv = _build_equiv(p1, corpus, cfg)
    result.equiv = equiv
    candidates = _phase2(equiv, cfg)
    result.p12 = candidates[0]
    result.o12 = ranker.score(candidates[0])
    p123, rewrite_result = _phase3(equiv, candidates, cfg)
    result.p123 = p123
    result.o123 = ranker.score(p123)
    result.steps = rewrite_result.steps
    result.t_opt_ms = (time.perf_counter() - t1) * 1000.0
    result.emitted = translate(p123)
    return result


def converge_examples(
    corpus: InputCorpus,
    reference: Node | Mapping[str, str],
    ranker: Ranker,
    cfg: SynthConfig | None = None,
) -> tuple[int, Node]:
    """Example count needed to reach the reference behavior on the corpus.

    Counterexample-guided loop: start from the first corpus input's pair,
    synthesize under the ranker, and add the first disagreeing pair until
    the candidate agrees with the reference everywhere.  The reference is
    a program or an explicit input-to-output mapping covering the corpus.
    """
    cfg = cfg or SynthConfig()
    if isinstance(reference, Mapping):
        lookup = dict(reference)
        missing = [i for i in corpus.inputs if i not in lookup]
        if missing:
            raise ValueError(f"reference does not cover corpus input {missing[0]!r}")
    else:
        try:
            lookup = {i: evaluate(reference, i) for i in corpus.inputs}
        except EvalError as exc:
            raise ValueError(f"reference program fails on a corpus input: {exc}") from exc

    examples: list[tuple[str, str]] = [(corpus.inputs[0], lookup[corpus.inputs[0]])]
    while True:
        results = synthesize(ExampleSet(tuple(examples)), ranker, replace(cfg, top_k=1))
        if not results:
            raise SynthesisFailure(
                f"convergence loop failed after {len(examples)} examples"
            )
        candidate = results[0]
        counterexample = None
        for text in corpus.inputs:
            try:
                got = evaluate(candidate, text)
            except EvalError:
                got = None
            if got != lookup[text]:
                counterexample = (text, lookup[text])
                break
        if counterexample is None:
            return len(examples), candidate
        examples.append(counterexample)


def run_ablation(
    examples: ExampleSet,
    corpus: InputCorpus,
    cfg: PipelineConfig,
    reference: Mapping[str, str] | None = None,
) -> RunResult:
    """Run the pipeline with one phase skipped (cfg.ablation selects which).

    skip1 measures convergence example counts e1/e2 instead of using the
    seed examples; skip2 rewrites p1 directly (yielding p13); skip3 stops
    after global search (p12 only).
    """
    ranker = cfg.cost_ranker()
    result = RunResult(objective=cfg.objective)

    if cfg.ablation == "skip1":
        if reference is None:
            p1 = _phase1(examples, cfg)
            reference = {}
            for text in corpus.inputs:
                try:
                    reference[text] = evaluate(p1, text)
                except EvalError:
                    continue
        covered = InputCorpus(tuple(i for i in corpus.inputs if i in reference))
        result.e1, _ = converge_examples(covered, reference, INTENT, cfg.synth)
        result.e2, p_cost = converge_examples(covered, reference, ranker, cfg.synth)
        result.p12 = p_cost
        result.o12 = ranker.score(p_cost)
        return result

    if cfg.ablation == "skip2":
        p1 = _phase1(examples, cfg)
        result.p1 = p1
        result.o1 = ranker.score(p1)
        result.e1 = len(examples.pairs)
        equiv = _build_equiv(p1, corpus, cfg)
        result.equiv = equiv
        rewrite_result = enumerative_synth(
            equiv, ranker, p1, shipped_rules(), cfg.rewrite_budget
        )
        result.p13 = rewrite_result.program
        result.o13 = ranker.score(rewrite_result.program)
        result.steps = rewrite_result.steps
        return result

    if cfg.ablation == "skip3":
        p1 = _phase1(examples, cfg)
        result.p1 = p1
        result.o1 = ranker.score(p1)
        result.e1 = len(examples.pairs)
        equiv = _build_equiv(p1, corpus, cfg)
        result.equiv = equiv
        candidates = _phase2(equiv, cfg)
        result.p12 = candidates[0]
        result.o12 = ranker.score(candidates[0])
        result.emitted = translate(candidates[0])
        return result

    raise ValueError("run_ablation requires cfg.ablation in skip1/skip2/skip3")
