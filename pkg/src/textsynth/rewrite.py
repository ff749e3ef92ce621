"""Local search: guarded rewriting from the core DSL into the extended DSL.

Each rule is unsound in general; it is only applied when the rewritten
program behaves identically to the current one on every input of the
equivalence specification (the dynamic realization of a rule
precondition).  Search runs in two phases: a greedy fixpoint over the
cost-decreasing rules (each application must strictly improve the rank,
so the phase terminates), followed by a budget-bounded best-first pass
over the full rule set that can cross rank-neutral intermediate states.
The result always ranks at least as high as the starting program.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import count
from typing import Callable, Sequence

from .dsl import (
    CPos,
    Concat,
    ConstStr,
    EvalError,
    FindPos,
    Node,
    PUNCT_CHARS,
    RPos,
    TokenPattern,
    evaluate,
    lit,
    replace_at,
    resolve_pos,
    size,
    subprograms,
)
from .rankers import Ranker
from .sexpr import serialize

__all__ = [
    "EquivSpec",
    "RewriteRule",
    "RewriteStep",
    "RewriteResult",
    "shipped_rules",
    "enumerative_synth",
]


@dataclass(frozen=True)
class EquivSpec:
    """Input-output pairs produced by running one reference program on a sample."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ValueError("equivalence specification must be nonempty")

    @classmethod
    def from_program(cls, program: Node, inputs: Sequence[str]) -> "EquivSpec":
        """Record the program's behavior on the sample; inputs it fails on are
        dropped (the specification only constrains where the reference is
        defined)."""
        pairs = []
        for text in inputs:
            try:
                pairs.append((text, evaluate(program, text)))
            except EvalError:
                continue
        if not pairs:
            raise ValueError("reference program fails on every sampled input")
        return cls(tuple(pairs))

    def satisfied_by(self, program: Node) -> bool:
        for text, expected in self.pairs:
            try:
                if evaluate(program, text) != expected:
                    return False
            except EvalError:
                return False
        return True


_Matcher = Callable[[Node, EquivSpec], list[tuple[tuple[int, ...], Node]]]


@dataclass(frozen=True)
class RewriteRule:
    """A structural matcher/builder pair plus metadata.

    ``cost_decreasing`` names the rankers under which an application never
    raises the cost; only those rules participate in the greedy phase.
    The precondition is behavioral: the rewritten program must agree with
    the original on every specification input.
    """

    id: str
    cost_decreasing: frozenset[str]
    matcher: _Matcher

    def candidates(self, program: Node, equiv: EquivSpec) -> list[tuple[tuple[int, ...], Node]]:
        found = self.matcher(program, equiv)
        # leftmost-innermost application order
        found.sort(key=lambda item: (-len(item[0]), item[0]))
        return found

    def precondition(self, candidate: Node, equiv: EquivSpec) -> bool:
        return equiv.satisfied_by(candidate)


def _match_rpos_to_cpos(program: Node, equiv: EquivSpec):
    out = []
    for path, node in subprograms(program):
        if not isinstance(node, RPos):
            continue
        values = set()
        for text, _ in equiv.pairs:
            try:
                values.add(resolve_pos(node, text))
            except EvalError:
                values.clear()
                break
            if len(values) > 1:
                break
        if len(values) == 1:
            out.append((path, CPos(values.pop())))
    return out


def _as_needle(pattern: TokenPattern) -> str | None:
    if len(pattern.tokens) != 1:
        return None
    tok = pattern.tokens[0]
    if tok.is_literal:
        return tok.text
    return PUNCT_CHARS.get(tok.kind)


def _match_rpos_to_find(program: Node, equiv: EquivSpec):
    out = []
    for path, node in subprograms(program):
        if not isinstance(node, RPos):
            continue
        needle = _as_needle(node.left)
        if needle is not None:
            out.append((path, FindPos(needle, node.occurrence, "after")))
        needle = _as_needle(node.right)
        if needle is not None:
            out.append((path, FindPos(needle, node.occurrence, "before")))
    return out


def _match_token_simplify(program: Node, equiv: EquivSpec):
    out = []
    for path, node in subprograms(program):
        if not isinstance(node, RPos):
            continue
        for side in (0, 1):
            pattern = node.left if side == 0 else node.right
            replacements: list[TokenPattern] = []
            if len(pattern.tokens) == 2:
                for keep in (0, 1):
                    try:
                        replacements.append(TokenPattern((pattern.tokens[keep],)))
                    except ValueError:
                        pass  # dropping would misplace an anchor
            if len(pattern.tokens) == 1 and pattern.tokens[0].kind in PUNCT_CHARS:
                replacements.append(TokenPattern((lit(PUNCT_CHARS[pattern.tokens[0].kind]),)))
            for repl in replacements:
                if side == 0:
                    out.append((path, RPos(repl, node.right, node.occurrence)))
                else:
                    out.append((path, RPos(node.left, repl, node.occurrence)))
    return out


def _match_const_fold(program: Node, equiv: EquivSpec):
    out = []
    for path, node in subprograms(program):
        if not isinstance(node, Concat):
            continue
        for i in range(len(node.parts) - 1):
            a, b = node.parts[i], node.parts[i + 1]
            if isinstance(a, ConstStr) and isinstance(b, ConstStr):
                merged = node.parts[:i] + (ConstStr(a.text + b.text),) + node.parts[i + 2 :]
                out.append((path, Concat(merged)))
    return out


def _match_cpos_normalize(program: Node, equiv: EquivSpec):
    lengths = {len(text) for text, _ in equiv.pairs}
    if len(lengths) != 1:
        return []
    n = lengths.pop()
    out = []
    for path, node in subprograms(program):
        if not isinstance(node, CPos):
            continue
        if node.index < 0:
            q = n + 1 + node.index
            if 0 <= q <= n:
                out.append((path, CPos(q)))
        elif node.index <= n:
            out.append((path, CPos(node.index - n - 1)))
    return out


def shipped_rules() -> list[RewriteRule]:
    """The bundled rule set, in greedy application order."""
    return [
        RewriteRule("rpos_to_cpos", frozenset({"size", "perf"}), _match_rpos_to_cpos),
        RewriteRule("rpos_to_find", frozenset({"size", "perf"}), _match_rpos_to_find),
        RewriteRule("token_simplify", frozenset({"size", "perf"}), _match_token_simplify),
        RewriteRule("const_fold", frozenset({"size", "perf", "intent"}), _match_const_fold),
        RewriteRule("cpos_normalize", frozenset(), _match_cpos_normalize),
    ]


@dataclass(frozen=True)
class RewriteStep:
    rule_id: str
    path: tuple[int, ...]
    before: str
    after: str


@dataclass(frozen=True)
class RewriteResult:
    program: Node
    steps: tuple[RewriteStep, ...]
    greedy_applications: int
    expansions: int


def _full_key(ranker: Ranker, program: Node):
    return (ranker.cost(program), size(program), serialize(program))


def enumerative_synth(
    equiv: EquivSpec,
    ranker: Ranker,
    program: Node,
    rules: Sequence[RewriteRule] | None = None,
    budget: int = 500,
) -> RewriteResult:
    """Highest-ranked program reachable from ``program`` under the rules.

    Requires the starting program to satisfy the specification; every
    intermediate state is guard-checked, so the result satisfies it too.
    """
    if rules is None:
        rules = shipped_rules()
    if not equiv.satisfied_by(program):
        raise ValueError("starting program does not satisfy the equivalence specification")

    steps: list[RewriteStep] = []
    current = program
    current_cost = ranker.cost(current)
    greedy_applications = 0

    # Phase 1: greedy fixpoint over cost-decreasing rules.
    progressed = True
    while progressed:
        progressed = False
        for rule in rules:
            if ranker.name not in rule.cost_decreasing:
                continue
            for path, replacement in rule.candidates(current, equiv):
                candidate = replace_at(current, path, replacement)
                if ranker.cost(candidate) >= current_cost:
                    continue
                if not rule.precondition(candidate, equiv):
                    continue
                steps.append(
                    RewriteStep(
                        rule.id,
                        path,
                        serialize(current),
                        serialize(candidate),
                    )
                )
                current = candidate
                current_cost = ranker.cost(candidate)
                greedy_applications += 1
                progressed = True
                break
            if progressed:
                break

    # Phase 2: bounded best-first over the full rule set (handles chains
    # through rank-neutral states that greedy cannot take).
    best = current
    best_key = _full_key(ranker, current)
    seen = {serialize(current)}
    tie = count()
    frontier = [(best_key, next(tie), current, tuple(steps))]
    expansions = 0
    best_steps = tuple(steps)
    while frontier and expansions < budget:
        _, _, prog, prog_steps = heapq.heappop(frontier)
        expansions += 1
        for rule in rules:
            for path, replacement in rule.candidates(prog, equiv):
                candidate = replace_at(prog, path, replacement)
                text = serialize(candidate)
                if text in seen:
                    continue
                seen.add(text)
                if not rule.precondition(candidate, equiv):
                    continue
                step = RewriteStep(rule.id, path, serialize(prog), text)
                cand_steps = prog_steps + (step,)
                cand_key = _full_key(ranker, candidate)
                heapq.heappush(frontier, (cand_key, next(tie), candidate, cand_steps))
                if cand_key < best_key:
                    best, best_key, best_steps = candidate, cand_key, cand_steps
    return RewriteResult(best, best_steps, greedy_applications, expansions)
