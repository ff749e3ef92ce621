"""Top-down deductive synthesis over the core DSL.

``synthesize`` returns the top-k ranked programs consistent with every
example.  The search works backwards from the outputs: concatenations are
deduced by splitting the remaining output across all examples jointly,
substring atoms by locating output fragments inside the inputs
(``witness_substr``) and intersecting, across examples, the sets of
position programs that resolve to the fragment endpoints (``witness_pos``).
Sub-searches are memoized on the derived sub-specification (the tuple of
per-example remaining suffixes plus the parts budget), and each memo cell
keeps the k best completions under the total order
(rank desc, size asc, serialized text asc).

Because every shipped ranker is a negated sum of per-node weights, that
order composes under substitution, so per-cell k-best merging is exact:
the first returned program really is the rank maximum over the whole
bounded language restricted to consistent programs.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import count
from typing import Sequence

from .dsl import (
    CPos,
    Concat,
    ConstStr,
    DEFAULT_TOKEN_KINDS,
    PosNode,
    RPos,
    SubStr,
    Token,
    TokenPattern,
    size,
)
from .rankers import Ranker
from .sexpr import serialize

__all__ = [
    "ExampleSet",
    "SynthConfig",
    "SynthesisDeadline",
    "witness_concat",
    "witness_substr",
    "witness_pos",
    "synthesize",
    "enumerate_patterns",
]


@dataclass(frozen=True)
class ExampleSet:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise ValueError("example set must be nonempty")

    @classmethod
    def of(cls, *pairs: tuple[str, str]) -> "ExampleSet":
        return cls(tuple(pairs))


@dataclass(frozen=True)
class SynthConfig:
    """Finiteness bounds for the searched language plus search knobs."""

    max_concat_parts: int = 4
    max_const_len: int = 12
    max_k_abs: int = 3
    max_pattern_len: int = 2
    token_kinds: tuple[str, ...] = DEFAULT_TOKEN_KINDS
    top_k: int = 1
    deadline_ms: int | None = None

    def __post_init__(self) -> None:
        for name in ("max_concat_parts", "max_const_len", "max_k_abs", "top_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


class SynthesisDeadline(RuntimeError):
    """Deadline exceeded; distinct from 'no consistent program exists'."""


# ---------------------------------------------------------------------------
# Witness functions (inverse operator semantics)
# ---------------------------------------------------------------------------


def witness_concat(output: str) -> list[tuple[str, str]]:
    """All (first-part, rest) splits of an output.

    Prefixes are nonempty; the final (output, "") entry is the terminal
    single-part case.  The empty output has only the terminal case.
    """
    if not output:
        return [("", "")]
    splits = [(output[:i], output[i:]) for i in range(1, len(output))]
    splits.append((output, ""))
    return splits


def witness_substr(text: str, output: str) -> list[tuple[int, int]]:
    """Every span (a, b) of text with text[a:b] == output, in increasing order."""
    if not output:
        return [(a, a) for a in range(len(text) + 1)]
    spans = []
    i = text.find(output)
    while i != -1:
        spans.append((i, i + len(output)))
        i = text.find(output, i + 1)
    return spans


@lru_cache(maxsize=64)
def enumerate_patterns(
    token_kinds: tuple[str, ...], max_len: int
) -> tuple[TokenPattern, ...]:
    """All token patterns up to max_len over the given class kinds plus anchors."""
    classes = [Token(k) for k in token_kinds]
    pats: list[TokenPattern] = [TokenPattern()]
    if max_len >= 1:
        pats += [TokenPattern((t,)) for t in classes]
        pats += [TokenPattern((Token("start"),)), TokenPattern((Token("end"),))]
    if max_len >= 2:
        pats += [TokenPattern((a, b)) for a in classes for b in classes]
        pats += [TokenPattern((Token("start"), b)) for b in classes]
        pats += [TokenPattern((a, Token("end"))) for a in classes]
        pats.append(TokenPattern((Token("start"), Token("end"))))
    return tuple(pats)


class _PatternIndex:
    """Per-input index: which patterns match ending/starting at each position."""

    def __init__(self, text: str, cfg: SynthConfig):
        self.text = text
        patterns = enumerate_patterns(cfg.token_kinds, cfg.max_pattern_len)
        n = len(text)
        self.ends: dict[TokenPattern, frozenset[int]] = {}
        self.starts: dict[TokenPattern, frozenset[int]] = {}
        for pat in patterns:
            self.ends[pat] = frozenset(
                q for q in range(n + 1) if pat.matches_ending_at(text, q)
            )
            self.starts[pat] = frozenset(
                q for q in range(n + 1) if pat.matches_starting_at(text, q)
            )
        self.patterns = patterns
        self._bounds: dict[tuple[TokenPattern, TokenPattern], list[int]] = {}

    def boundary_list(self, left: TokenPattern, right: TokenPattern) -> list[int]:
        key = (left, right)
        got = self._bounds.get(key)
        if got is None:
            got = sorted(self.ends[left] & self.starts[right])
            self._bounds[key] = got
        return got


def witness_pos(text: str, target: int, cfg: SynthConfig) -> list[PosNode]:
    """All bounded position programs resolving to target on this input.

    Covers both absolute forms (from-start and from-end) and every boundary
    pattern pair within the configured pattern-length and occurrence bounds.
    """
    if target < 0 or target > len(text):
        raise ValueError(f"target {target} outside [0, {len(text)}]")
    index = _PatternIndex(text, cfg)
    return _positions_for(index, target, cfg)


def _positions_for(index: _PatternIndex, target: int, cfg: SynthConfig) -> list[PosNode]:
    text = index.text
    out: list[PosNode] = [CPos(target), CPos(target - len(text) - 1)]
    lefts = [p for p in index.patterns if target in index.ends[p]]
    rights = [p for p in index.patterns if target in index.starts[p]]
    for left in lefts:
        for right in rights:
            bounds = index.boundary_list(left, right)
            idx = bounds.index(target)
            k_pos = idx + 1
            k_neg = idx - len(bounds)
            if k_pos <= cfg.max_k_abs:
                out.append(RPos(left, right, k_pos))
            if -k_neg <= cfg.max_k_abs:
                out.append(RPos(left, right, k_neg))
    return out


# ---------------------------------------------------------------------------
# k-best machinery
# ---------------------------------------------------------------------------

# A ranked item is (cost, size, text-key, payload); lists are sorted ascending.
_Key = tuple[Fraction, int, tuple[str, ...]]


def _kbest_merge(streams: list[list], k: int | None) -> list:
    """Merge sorted lists into one sorted list of at most k items."""
    merged = heapq.merge(*streams, key=lambda item: (item[0], item[1], item[2]))
    if k is None:
        return list(merged)
    out = []
    for item in merged:
        out.append(item)
        if len(out) >= k:
            break
    return out


def _kbest_product(left: list, right: list, combine, k: int | None) -> list:
    """k smallest combinations of two sorted lists under a monotone combiner."""
    if not left or not right:
        return []
    if k is None:
        return sorted(
            (combine(a, b) for a in left for b in right),
            key=lambda item: (item[0], item[1], item[2]),
        )
    out = []
    seen = {(0, 0)}
    tie = count()
    first = combine(left[0], right[0])
    heap = [((first[0], first[1], first[2]), next(tie), 0, 0, first)]
    while heap and len(out) < k:
        _, _, i, j, item = heapq.heappop(heap)
        out.append(item)
        for ni, nj in ((i + 1, j), (i, j + 1)):
            if ni < len(left) and nj < len(right) and (ni, nj) not in seen:
                seen.add((ni, nj))
                nxt = combine(left[ni], right[nj])
                heapq.heappush(heap, ((nxt[0], nxt[1], nxt[2]), next(tie), ni, nj, nxt))
    return out


# ---------------------------------------------------------------------------
# The deduction job
# ---------------------------------------------------------------------------


class _Job:
    def __init__(self, pairs: Sequence[tuple[str, str]], ranker: Ranker, cfg: SynthConfig):
        self.inputs = [p[0] for p in pairs]
        self.outputs = [p[1] for p in pairs]
        self.n = len(pairs)
        self.ranker = ranker
        self.cfg = cfg
        self.k: int | None = cfg.top_k
        self._deadline = (
            time.monotonic() + cfg.deadline_ms / 1000.0 if cfg.deadline_ms else None
        )
        self._indexes = [_PatternIndex(text, cfg) for text in self.inputs]
        self._sink = tuple(len(o) for o in self.outputs)
        # Position-program interning: sets of positions are sets of small ints.
        self._pos_nodes: list[PosNode] = []
        self._pos_ids: dict[PosNode, int] = {}
        self._pos_keys: list[tuple[Fraction, int, str]] = []
        self._pos_sets: dict[tuple[int, int], frozenset[int]] = {}
        self._pos_sorted: dict[frozenset[int], list[int]] = {}
        self._edges: dict[tuple[int, ...], list] = {}
        self._memo: dict[tuple[tuple[int, ...], int], list] = {}
        self._empty_prefix_pools: list[list[tuple[frozenset[int], frozenset[int]]]] = []

    def _check_deadline(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise SynthesisDeadline(
                f"synthesis exceeded deadline of {self.cfg.deadline_ms} ms"
            )

    # -- positions ---------------------------------------------------------

    def _intern(self, node: PosNode) -> int:
        got = self._pos_ids.get(node)
        if got is None:
            got = len(self._pos_nodes)
            self._pos_nodes.append(node)
            self._pos_keys.append((self.ranker.cost(node), size(node), serialize(node)))
            self._pos_ids[node] = got
        return got

    def _pos_set(self, ex: int, target: int) -> frozenset[int]:
        key = (ex, target)
        got = self._pos_sets.get(key)
        if got is None:
            nodes = _positions_for(self._indexes[ex], target, self.cfg)
            got = frozenset(self._intern(n) for n in nodes)
            self._pos_sets[key] = got
        return got

    def _pos_rank_key(self, pid: int) -> tuple[Fraction, int, str]:
        return self._pos_keys[pid]

    def _sorted_ids(self, ids: frozenset[int]) -> list[int]:
        got = self._pos_sorted.get(ids)
        if got is None:
            got = sorted(ids, key=self._pos_rank_key)
            self._pos_sorted[ids] = got
        return got

    # -- atoms -------------------------------------------------------------

    def _const_item(self, text: str):
        atom = ConstStr(text)
        cost = self.ranker.weights.node_cost(atom) + self.ranker.weights.concat_per_part
        return (cost, 1, (serialize(atom),), (atom,))

    def _substr_items(self, a_ids: frozenset[int], b_ids: frozenset[int], k: int | None):
        w = self.ranker.weights
        base = w.substr + w.concat_per_part

        def combine(a_item, b_item):
            a_cost, a_size, a_text, a_node = a_item
            b_cost, b_size, b_text, b_node = b_item
            atom = SubStr(a_node, b_node)
            return (
                base + a_cost + b_cost,
                1 + a_size + b_size,
                (f"(substr {a_text} {b_text})",),
                (atom,),
            )

        def items(ids: frozenset[int]):
            out = []
            for pid in self._sorted_ids(ids):
                cost, sz, text = self._pos_rank_key(pid)
                out.append((cost, sz, text, self._pos_nodes[pid]))
            return out

        return _kbest_product(items(a_ids), items(b_ids), combine, k)

    # -- all-empty atoms (atoms producing "" on every example) -------------

    def _empty_pool_prefix(self, upto: int) -> list[tuple[frozenset[int], frozenset[int]]]:
        """Substr pools whose atoms yield "" on examples 0..upto (inclusive)."""
        while len(self._empty_prefix_pools) <= upto:
            j = len(self._empty_prefix_pools)
            self._check_deadline()
            diag = [
                (self._pos_set(j, t), self._pos_set(j, t))
                for t in range(len(self.inputs[j]) + 1)
            ]
            if j == 0:
                self._empty_prefix_pools.append(diag)
            else:
                merged = []
                for a_prev, b_prev in self._empty_prefix_pools[j - 1]:
                    for a_new, b_new in diag:
                        a2 = a_prev & a_new
                        if not a2:
                            continue
                        b2 = b_prev & b_new
                        if not b2:
                            continue
                        merged.append((a2, b2))
                self._empty_prefix_pools.append(merged)
        return self._empty_prefix_pools[upto]

    # -- edges -------------------------------------------------------------

    def _spans_for(self, ex: int, offset: int, include_empty: bool):
        """Candidate (span, consumed) pairs for one example's remaining output."""
        text = self.inputs[ex]
        rem = self.outputs[ex][offset:]
        spans: list[tuple[tuple[int, int], int]] = []
        if include_empty:
            spans.extend(((t, t), 0) for t in range(len(text) + 1))
        for length in range(1, min(len(rem), len(text)) + 1):
            for span in witness_substr(text, rem[:length]):
                spans.append((span, length))
        return spans

    def edges(self, state: tuple[int, ...]) -> list:
        """Outgoing choices: (kind, payload, next_state).

        kind 'const': payload is the literal text.
        kind 'pool':  payload is (start-position ids, end-position ids).
        """
        got = self._edges.get(state)
        if got is not None:
            return got
        self._check_deadline()
        out = []

        # Literal atoms: a common nonempty prefix of every remaining output.
        rems = [self.outputs[j][state[j] :] for j in range(self.n)]
        limit = min(self.cfg.max_const_len, min(len(r) for r in rems))
        for length in range(1, limit + 1):
            text = rems[0][:length]
            if all(r.startswith(text) for r in rems):
                nxt = tuple(state[j] + length for j in range(self.n))
                out.append(("const", text, nxt))
            else:
                break

        # Substring atoms: fold span candidates across examples, intersecting
        # endpoint position sets.  Entries that consume nothing anywhere are
        # handled by the shared all-empty pool instead.
        mixed: list[tuple[frozenset[int], frozenset[int], tuple[int, ...]]] = []
        for j in range(self.n):
            self._check_deadline()
            nonzero = self._spans_for(j, state[j], include_empty=False)
            zero = [((t, t), 0) for t in range(len(self.inputs[j]) + 1)]
            new_mixed = []
            for a_prev, b_prev, lens in mixed:
                for (s, e), length in nonzero + zero:
                    a2 = a_prev & self._pos_set(j, s)
                    if not a2:
                        continue
                    b2 = b_prev & self._pos_set(j, e)
                    if not b2:
                        continue
                    new_mixed.append((a2, b2, lens + (length,)))
            seed = [(None, None)] if j == 0 else self._empty_pool_prefix(j - 1)
            zeros = (0,) * j
            for a_prev, b_prev in seed:
                for (s, e), length in nonzero:
                    a_new = self._pos_set(j, s)
                    b_new = self._pos_set(j, e)
                    a2 = a_new if a_prev is None else a_prev & a_new
                    if not a2:
                        continue
                    b2 = b_new if b_prev is None else b_prev & b_new
                    if not b2:
                        continue
                    new_mixed.append((a2, b2, zeros + (length,)))
            mixed = new_mixed
        for a_ids, b_ids, lens in mixed:
            nxt = tuple(state[j] + lens[j] for j in range(self.n))
            out.append(("pool", (a_ids, b_ids), nxt))

        self._edges[state] = out
        return out

    def _empty_atom_streams(self) -> list[list]:
        streams = [[self._const_item("")]]
        for a_ids, b_ids in self._empty_pool_prefix(self.n - 1):
            streams.append(self._substr_items(a_ids, b_ids, self.k))
        return streams

    # -- the k-best DP over (state, parts budget) --------------------------

    def best(self, state: tuple[int, ...], budget: int) -> list:
        """k best completions from state to the sink using <= budget parts."""
        key = (state, budget)
        got = self._memo.get(key)
        if got is not None:
            return got
        self._check_deadline()
        sink = state == self._sink
        streams: list[list] = []
        if sink:
            streams.append([(Fraction(0), 0, (), ())])
        if budget >= 1:
            def extend(atom_stream, rest):
                def combine(a_item, r_item):
                    return (
                        a_item[0] + r_item[0],
                        a_item[1] + r_item[1],
                        a_item[2] + r_item[2],
                        a_item[3] + r_item[3],
                    )

                return _kbest_product(atom_stream, rest, combine, self.k)

            for kind, payload, nxt in self.edges(state):
                rest = self.best(nxt, budget - 1)
                if not rest:
                    continue
                if kind == "const":
                    atoms = [self._const_item(payload)]
                else:
                    atoms = self._substr_items(payload[0], payload[1], self.k)
                streams.append(extend(atoms, rest))
            rest = self.best(state, budget - 1)
            if rest:
                for atoms in self._empty_atom_streams():
                    streams.append(extend(atoms, rest))
        result = _kbest_merge(streams, self.k)
        self._memo[key] = result
        return result

    def run(self) -> list[Concat]:
        start = (0,) * self.n
        if start == self._sink and self.k is not None:
            self.k += 1  # the empty completion at the sink occupies one slot
        completions = self.best(start, self.cfg.max_concat_parts)
        programs = []
        for _cost, _size, _texts, parts in completions:
            if not parts:
                continue  # the empty completion at the sink is not a program
            programs.append(Concat(parts))
        return programs


def synthesize(examples: ExampleSet, ranker: Ranker, cfg: SynthConfig) -> list[Concat]:
    """Top-k consistent programs, best first; empty list when none exists.

    The list is ordered by (rank desc, size asc, serialized text asc).  A
    deadline raises SynthesisDeadline rather than returning partial results.
    """
    dedup: dict[str, str] = {}
    for text, out in examples.pairs:
        if dedup.get(text, out) != out:
            return []  # contradictory examples: same input, two outputs
        dedup[text] = out
    pairs = list(dedup.items())
    job = _Job(pairs, ranker, cfg)
    return job.run()
