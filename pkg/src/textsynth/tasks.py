"""Benchmark task files: loading and validation.

A task is a JSON object::

    {
      "name": str,
      "objective": "size" | "perf",
      "examples": [{"in": str, "out": str}, ...],
      "corpus": [str, ...],
      "reference": {input: output, ...}        # optional
    }

Seed example inputs must appear in the corpus.  The optional reference
map is harness-side ground truth: it must cover the whole corpus and
agree with the seed examples.  It is never consumed by synthesis itself,
only by convergence measurement and output validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .sampling import InputCorpus
from .synthesis import ExampleSet

__all__ = ["BenchmarkTask", "TaskError", "load_task", "load_suite"]


class TaskError(ValueError):
    def __init__(self, path, field: str, message: str):
        super().__init__(f"{path}: field {field!r}: {message}")
        self.path = str(path)
        self.field = field


@dataclass(frozen=True)
class BenchmarkTask:
    name: str
    objective: str
    examples: ExampleSet
    corpus: InputCorpus
    reference: dict[str, str] | None


def _require(condition: bool, path, field: str, message: str) -> None:
    if not condition:
        raise TaskError(path, field, message)


def load_task(path: str | Path) -> BenchmarkTask:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise TaskError(path, "<file>", f"cannot read: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TaskError(path, "<file>", f"malformed JSON: {exc}") from exc

    _require(isinstance(data, dict), path, "<root>", "expected a JSON object")
    name = data.get("name")
    _require(isinstance(name, str) and bool(name), path, "name", "nonempty string required")
    objective = data.get("objective")
    _require(objective in ("size", "perf"), path, "objective", "must be 'size' or 'perf'")

    raw_examples = data.get("examples")
    _require(
        isinstance(raw_examples, list) and raw_examples,
        path,
        "examples",
        "nonempty list required",
    )
    pairs = []
    seen_inputs = set()
    for i, item in enumerate(raw_examples):
        field = f"examples[{i}]"
        _require(isinstance(item, dict), path, field, "expected an object")
        _require(
            isinstance(item.get("in"), str) and isinstance(item.get("out"), str),
            path,
            field,
            "requires string fields 'in' and 'out'",
        )
        _require(item["in"] not in seen_inputs, path, field, "duplicate example input")
        seen_inputs.add(item["in"])
        pairs.append((item["in"], item["out"]))

    raw_corpus = data.get("corpus")
    _require(
        isinstance(raw_corpus, list) and raw_corpus,
        path,
        "corpus",
        "nonempty list required",
    )
    _require(
        all(isinstance(x, str) for x in raw_corpus), path, "corpus", "strings required"
    )
    corpus_set = set(raw_corpus)
    for text, _ in pairs:
        _require(
            text in corpus_set, path, "examples", f"example input {text!r} not in corpus"
        )

    reference = data.get("reference")
    if reference is not None:
        _require(isinstance(reference, dict), path, "reference", "expected an object")
        for key, value in reference.items():
            _require(
                isinstance(value, str), path, "reference", f"output for {key!r} not a string"
            )
        for text in raw_corpus:
            _require(
                text in reference, path, "reference", f"corpus input {text!r} not covered"
            )
        for text, out in pairs:
            _require(
                reference.get(text) == out,
                path,
                "reference",
                f"disagrees with seed example for {text!r}",
            )

    extra = set(data) - {"name", "objective", "examples", "corpus", "reference"}
    _require(not extra, path, sorted(extra)[0] if extra else "", "unknown field")

    return BenchmarkTask(
        name=name,
        objective=objective,
        examples=ExampleSet(tuple(pairs)),
        corpus=InputCorpus(tuple(raw_corpus)),
        reference=dict(reference) if reference is not None else None,
    )


def load_suite(directory: str | Path) -> list[BenchmarkTask]:
    """All *.json tasks in a directory, sorted by filename."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise TaskError(directory, "<dir>", "no task files found")
    return [load_task(p) for p in paths]
