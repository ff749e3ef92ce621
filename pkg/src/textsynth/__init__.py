"""Synthesis of string-transformation programs from examples, optimized
for a cost objective (program size or predicted performance), with
emission of standalone Python source."""

from .dsl import (
    CPos,
    Concat,
    ConstStr,
    EvalError,
    FindPos,
    RPos,
    SubStr,
    Token,
    TokenPattern,
    evaluate,
    size,
    subprograms,
)
from .pipeline import PipelineConfig, RunResult, SynthesisFailure, converge_examples, run_ablation, run_pipeline
from .rankers import INTENT, PERF, SIZE, Ranker, Weights, load_weights, rank_intent, rank_perf, rank_size
from .rewrite import EquivSpec, RewriteRule, enumerative_synth, shipped_rules
from .sampling import InputCorpus, Profile, profile, representative_sample
from .sexpr import ParseError, parse, serialize
from .synthesis import ExampleSet, SynthConfig, SynthesisDeadline, synthesize
from .codegen import EmittedSource, translate

__version__ = "0.1.0"
