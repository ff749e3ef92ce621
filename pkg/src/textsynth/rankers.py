"""Ranking functions over (sub)programs.

Every ranker scores a node as the negated sum of per-node weights, so a
higher score means a cheaper program.  The sum-over-nodes shape makes each
ranker monotonic: replacing a subprogram with a higher-scoring one raises
the score of the whole program, which the synthesis engine relies on for
returning true rank maxima.

Weights are nonnegative rationals with small denominators (values from
weight files are parsed as exact decimals), so scores compare exactly and
strictly-improving rewrite chains terminate.

Shipped rankers:

* ``intent``   -- disambiguation: prefers generalizing position logic
  (boundary patterns over absolute indices) and penalizes literals by
  length, approximating what a user most likely meant.
* ``size``     -- score is exactly ``-size(p)``.
* ``perf``     -- hand-written cost model of the emitted code: absolute
  indices are cheap, substring search moderate, boundary scans expensive.
  It predicts relative execution cost, not wall-clock time.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .dsl import (
    CPos,
    Concat,
    ConstStr,
    FindPos,
    Node,
    RPos,
    SubStr,
    Token,
)

__all__ = [
    "Weights",
    "Ranker",
    "INTENT",
    "SIZE",
    "PERF",
    "rank_intent",
    "rank_size",
    "rank_perf",
    "ranker_for_objective",
    "load_weights",
]


@dataclass(frozen=True)
class Weights:
    """Per-node-kind nonnegative costs; Concat additionally pays per part."""

    concat_node: Fraction = Fraction(0)
    concat_per_part: Fraction = Fraction(1)
    conststr_base: Fraction = Fraction(1)
    conststr_per_char: Fraction = Fraction(0)
    substr: Fraction = Fraction(2)
    cpos: Fraction = Fraction(1)
    rpos: Fraction = Fraction(50)
    rpos_empty_side: Fraction = Fraction(0)
    token: Fraction = Fraction(5)
    findpos: Fraction = Fraction(5)

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"weight {name} must be nonnegative, got {value}")

    def node_cost(self, node: Node) -> Fraction:
        """Cost of one node, ignoring children (children are summed separately)."""
        if isinstance(node, Concat):
            return self.concat_node + self.concat_per_part * len(node.parts)
        if isinstance(node, ConstStr):
            return self.conststr_base + self.conststr_per_char * len(node.text)
        if isinstance(node, SubStr):
            return self.substr
        if isinstance(node, CPos):
            return self.cpos
        if isinstance(node, RPos):
            # a contentless side matches everywhere: such positions are
            # absolute indices in disguise and can be surcharged
            empty_sides = (not node.left.tokens) + (not node.right.tokens)
            return self.rpos + self.rpos_empty_side * empty_sides
        if isinstance(node, FindPos):
            return self.findpos
        if isinstance(node, Token):
            return self.token
        raise TypeError(f"cannot weigh {node!r}")


@dataclass(frozen=True)
class Ranker:
    name: str
    weights: Weights

    def cost(self, node: Node) -> Fraction:
        from .dsl import children

        total = self.weights.node_cost(node)
        for child in children(node):
            total += self.cost(child)
        return total

    def score(self, node: Node) -> Fraction:
        return -self.cost(node)


INTENT = Ranker(
    "intent",
    Weights(
        concat_node=Fraction(0),
        concat_per_part=Fraction(1),
        conststr_base=Fraction(1),
        conststr_per_char=Fraction(12),
        substr=Fraction(1),
        cpos=Fraction(10),
        rpos=Fraction(3),
        rpos_empty_side=Fraction(4),
        token=Fraction(1),
        findpos=Fraction(10),
    ),
)

SIZE = Ranker(
    "size",
    Weights(
        concat_node=Fraction(1),
        concat_per_part=Fraction(0),
        conststr_base=Fraction(1),
        conststr_per_char=Fraction(0),
        substr=Fraction(1),
        cpos=Fraction(1),
        rpos=Fraction(1),
        token=Fraction(1),
        findpos=Fraction(1),
    ),
)

PERF = Ranker(
    "perf",
    Weights(
        concat_node=Fraction(0),
        concat_per_part=Fraction(1),
        conststr_base=Fraction(1),
        conststr_per_char=Fraction(0),
        substr=Fraction(2),
        cpos=Fraction(1),
        rpos=Fraction(50),
        token=Fraction(5),
        findpos=Fraction(5),
    ),
)


def rank_intent(node: Node) -> Fraction:
    return INTENT.score(node)


def rank_size(node: Node) -> Fraction:
    return SIZE.score(node)


def rank_perf(node: Node) -> Fraction:
    return PERF.score(node)


def ranker_for_objective(objective: str, weights: Weights | None = None) -> Ranker:
    """Cost ranker for an objective name; optional weights override (perf only)."""
    if objective == "size":
        return SIZE
    if objective == "perf":
        return PERF if weights is None else Ranker("perf", weights)
    raise ValueError(f"unknown objective {objective!r} (expected size or perf)")


def load_weights(path: str | Path) -> Weights:
    """Load a key-value weight file (``name = decimal`` lines, # comments).

    Unknown keys are rejected; missing keys keep the perf defaults.
    """
    overrides: dict[str, Fraction] = {}
    valid = set(Weights.__dataclass_fields__)
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'name = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in valid:
            raise ValueError(f"{path}:{lineno}: unknown weight {key!r}")
        try:
            overrides[key] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{path}:{lineno}: bad value {value.strip()!r}") from None
    return replace(PERF.weights, **overrides)
