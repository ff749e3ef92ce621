"""Core string-transformation DSL: AST nodes, interpreter, and structural utilities.

Programs are immutable trees.  A full program is a ``Concat`` of atoms; each
atom is either a literal (``ConstStr``) or a slice of the single task input
(``SubStr``).  Slice endpoints are either absolute (``CPos``) or boundary
positions located by a pair of token patterns (``RPos``).  Two extended-only
constructs exist for the optimization stage: ``FindPos`` (substring search)
and literal tokens inside patterns.  Programs containing neither are "core".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "Token",
    "TokenPattern",
    "ConstStr",
    "SubStr",
    "CPos",
    "RPos",
    "FindPos",
    "Concat",
    "Node",
    "PosNode",
    "AtomNode",
    "EvalError",
    "CLASS_TOKEN_KINDS",
    "DEFAULT_TOKEN_KINDS",
    "PUNCT_CHARS",
    "DIGITS",
    "ALPHA",
    "LOWER",
    "UPPER",
    "SPACE",
    "SLASH",
    "DASH",
    "COMMA",
    "DOT",
    "COLON",
    "START",
    "END",
    "lit",
    "boundaries",
    "evaluate",
    "resolve_pos",
    "is_core",
    "size",
    "subprograms",
    "node_at",
    "replace_at",
    "children",
    "grammar_symbol",
]


# ---------------------------------------------------------------------------
# Tokens and patterns
# ---------------------------------------------------------------------------

PUNCT_CHARS = {
    "slash": "/",
    "dash": "-",
    "comma": ",",
    "dot": ".",
    "colon": ":",
}

# Character-class token kinds, in canonical order.
CLASS_TOKEN_KINDS = (
    "digits",
    "alpha",
    "lower",
    "upper",
    "space",
    "slash",
    "dash",
    "comma",
    "dot",
    "colon",
)

# Kinds usable in patterns during synthesis (anchors are always allowed too).
DEFAULT_TOKEN_KINDS = CLASS_TOKEN_KINDS

_ANCHOR_KINDS = ("start", "end")

_CLASS_PREDICATES: dict[str, Callable[[str], bool]] = {
    "digits": str.isdigit,
    "alpha": str.isalpha,
    "lower": lambda c: c.isalpha() and c.islower(),
    "upper": lambda c: c.isalpha() and c.isupper(),
    "space": str.isspace,
    "slash": lambda c: c == "/",
    "dash": lambda c: c == "-",
    "comma": lambda c: c == ",",
    "dot": lambda c: c == ".",
    "colon": lambda c: c == ":",
}


@dataclass(frozen=True)
class Token:
    """One pattern element: a character class, an anchor, or a literal."""

    kind: str
    text: str = ""

    def __post_init__(self) -> None:
        if self.kind == "lit":
            if not self.text:
                raise ValueError("literal token requires nonempty text")
        elif self.kind in _CLASS_PREDICATES or self.kind in _ANCHOR_KINDS:
            if self.text:
                raise ValueError(f"token kind {self.kind!r} carries no text")
        else:
            raise ValueError(f"unknown token kind {self.kind!r}")

    @property
    def is_literal(self) -> bool:
        return self.kind == "lit"


DIGITS = Token("digits")
ALPHA = Token("alpha")
LOWER = Token("lower")
UPPER = Token("upper")
SPACE = Token("space")
SLASH = Token("slash")
DASH = Token("dash")
COMMA = Token("comma")
DOT = Token("dot")
COLON = Token("colon")
START = Token("start")
END = Token("end")


def lit(text: str) -> Token:
    return Token("lit", text)


@dataclass(frozen=True)
class TokenPattern:
    """Ordered token sequence.  Class tokens match maximal nonempty runs of
    their class; the run may not extend on either side within the input.
    Literal tokens match their exact text.  An empty pattern matches the
    empty string at every position.
    """

    tokens: tuple[Token, ...] = ()

    def __post_init__(self) -> None:
        for i, tok in enumerate(self.tokens):
            if tok.kind == "start" and i != 0:
                raise ValueError("start anchor must be the first token")
            if tok.kind == "end" and i != len(self.tokens) - 1:
                raise ValueError("end anchor must be the last token")

    def __len__(self) -> int:
        return len(self.tokens)

    def matches_ending_at(self, text: str, pos: int) -> bool:
        """True if this pattern matches some substring ending exactly at pos."""
        i = pos
        for tok in reversed(self.tokens):
            if tok.kind == "start":
                return i == 0
            if tok.kind == "end":
                if i != len(text):
                    return False
                continue
            if tok.is_literal:
                j = i - len(tok.text)
                if j < 0 or text[j:i] != tok.text:
                    return False
                i = j
                continue
            pred = _CLASS_PREDICATES[tok.kind]
            if i == 0 or not pred(text[i - 1]):
                return False
            if i < len(text) and pred(text[i]):
                return False  # run extends rightward: not maximal
            j = i
            while j > 0 and pred(text[j - 1]):
                j -= 1
            i = j
        return True

    def matches_starting_at(self, text: str, pos: int) -> bool:
        """True if this pattern matches some substring starting exactly at pos."""
        i = pos
        for tok in self.tokens:
            if tok.kind == "end":
                return i == len(text)
            if tok.kind == "start":
                if i != 0:
                    return False
                continue
            if tok.is_literal:
                j = i + len(tok.text)
                if text[i:j] != tok.text:
                    return False
                i = j
                continue
            pred = _CLASS_PREDICATES[tok.kind]
            if i >= len(text) or not pred(text[i]):
                return False
            if i > 0 and pred(text[i - 1]):
                return False  # run extends leftward: not maximal
            j = i
            while j < len(text) and pred(text[j]):
                j += 1
            i = j
        return True


def boundaries(text: str, left: TokenPattern, right: TokenPattern) -> list[int]:
    """All positions q where left matches ending at q and right starting at q."""
    return [
        q
        for q in range(len(text) + 1)
        if left.matches_ending_at(text, q) and right.matches_starting_at(text, q)
    ]


# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CPos:
    """Absolute position; negative indices count from the end (-1 = length)."""

    index: int


@dataclass(frozen=True)
class RPos:
    """The k-th boundary between a match of ``left`` and a match of ``right``.

    Boundaries are enumerated left to right; occurrence != 0, negative
    occurrences count from the right.
    """

    left: TokenPattern
    right: TokenPattern
    occurrence: int

    def __post_init__(self) -> None:
        if self.occurrence == 0:
            raise ValueError("RPos occurrence must be nonzero")


@dataclass(frozen=True)
class FindPos:
    """Start or end of the k-th occurrence of a needle string (extended only)."""

    needle: str
    occurrence: int
    side: str  # "before" -> start of the occurrence, "after" -> end

    def __post_init__(self) -> None:
        if not self.needle:
            raise ValueError("FindPos needle must be nonempty")
        if self.occurrence == 0:
            raise ValueError("FindPos occurrence must be nonzero")
        if self.side not in ("before", "after"):
            raise ValueError(f"FindPos side must be before/after, got {self.side!r}")


PosNode = Union[CPos, RPos, FindPos]


@dataclass(frozen=True)
class ConstStr:
    text: str


@dataclass(frozen=True)
class SubStr:
    start: PosNode
    end: PosNode


AtomNode = Union[ConstStr, SubStr]


@dataclass(frozen=True)
class Concat:
    parts: tuple[AtomNode, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("Concat requires at least one part")


Node = Union[Concat, ConstStr, SubStr, CPos, RPos, FindPos, Token]


def is_core(node: Node) -> bool:
    """True when the program uses no extended-only constructs."""
    for _, sub in subprograms(node):
        if isinstance(sub, FindPos):
            return False
        if isinstance(sub, Token) and sub.is_literal:
            return False
    return True


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class EvalError(ValueError):
    """Raised when a program cannot produce an output for an input.

    Carries the path of the failing node so errors are attributable.
    """

    def __init__(self, message: str, path: tuple[int, ...]):
        super().__init__(f"{message} (at node path {list(path)})")
        self.path = path


def resolve_pos(pos: PosNode, text: str, path: tuple[int, ...] = ()) -> int:
    n = len(text)
    if isinstance(pos, CPos):
        q = pos.index if pos.index >= 0 else n + 1 + pos.index
        if q < 0 or q > n:
            raise EvalError(f"position {pos.index} out of range for length {n}", path)
        return q
    if isinstance(pos, RPos):
        bounds = boundaries(text, pos.left, pos.right)
        k = pos.occurrence
        if abs(k) > len(bounds):
            raise EvalError(
                f"boundary occurrence {k} not found ({len(bounds)} matches)", path
            )
        return bounds[k - 1] if k > 0 else bounds[len(bounds) + k]
    if isinstance(pos, FindPos):
        occ: list[int] = []
        i = text.find(pos.needle)
        while i != -1:
            occ.append(i)
            i = text.find(pos.needle, i + 1)
        k = pos.occurrence
        if abs(k) > len(occ):
            raise EvalError(
                f"occurrence {k} of {pos.needle!r} not found ({len(occ)} matches)", path
            )
        start = occ[k - 1] if k > 0 else occ[len(occ) + k]
        return start if pos.side == "before" else start + len(pos.needle)
    raise EvalError(f"not a position node: {pos!r}", path)


def evaluate(node: Node, text: str, path: tuple[int, ...] = ()) -> str:
    """Run a (sub)program on an input string.  Pure; raises EvalError on failure."""
    if isinstance(node, Concat):
        return "".join(
            evaluate(part, text, path + (i,)) for i, part in enumerate(node.parts)
        )
    if isinstance(node, ConstStr):
        return node.text
    if isinstance(node, SubStr):
        a = resolve_pos(node.start, text, path + (0,))
        b = resolve_pos(node.end, text, path + (1,))
        if a > b:
            raise EvalError(f"start position {a} after end position {b}", path)
        return text[a:b]
    raise EvalError(f"node is not string-valued: {node!r}", path)


# ---------------------------------------------------------------------------
# Structure: children, paths, size
# ---------------------------------------------------------------------------


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Concat):
        return node.parts
    if isinstance(node, SubStr):
        return (node.start, node.end)
    if isinstance(node, RPos):
        return node.left.tokens + node.right.tokens
    return ()


def _with_children(node: Node, new: tuple[Node, ...]) -> Node:
    if isinstance(node, Concat):
        return Concat(tuple(new))  # type: ignore[arg-type]
    if isinstance(node, SubStr):
        return SubStr(new[0], new[1])  # type: ignore[arg-type]
    if isinstance(node, RPos):
        split = len(node.left.tokens)
        return RPos(
            TokenPattern(tuple(new[:split])),  # type: ignore[arg-type]
            TokenPattern(tuple(new[split:])),  # type: ignore[arg-type]
            node.occurrence,
        )
    raise ValueError(f"node {node!r} has no children")


def size(node: Node) -> int:
    """Node count, including position nodes and each pattern token."""
    return 1 + sum(size(c) for c in children(node))


def subprograms(node: Node) -> list[tuple[tuple[int, ...], Node]]:
    """Preorder enumeration of all nodes with their paths; first is the root."""
    out: list[tuple[tuple[int, ...], Node]] = []

    def walk(n: Node, path: tuple[int, ...]) -> None:
        out.append((path, n))
        for i, c in enumerate(children(n)):
            walk(c, path + (i,))

    walk(node, ())
    return out


def node_at(node: Node, path: tuple[int, ...]) -> Node:
    for i in path:
        kids = children(node)
        if i >= len(kids):
            raise ValueError(f"path {list(path)} does not address a node")
        node = kids[i]
    return node


def grammar_symbol(node: Node) -> str:
    if isinstance(node, Concat):
        return "e"
    if isinstance(node, (ConstStr, SubStr)):
        return "f"
    if isinstance(node, (CPos, RPos, FindPos)):
        return "pos"
    return "token"


def replace_at(node: Node, path: tuple[int, ...], replacement: Node) -> Node:
    """Replace the node at path; the replacement must keep the same grammar symbol."""
    if not path:
        if grammar_symbol(node) != grammar_symbol(replacement):
            raise ValueError(
                f"cannot replace {grammar_symbol(node)} node with "
                f"{grammar_symbol(replacement)} node"
            )
        return replacement
    kids = list(children(node))
    if path[0] >= len(kids):
        raise ValueError(f"path {list(path)} does not address a node")
    kids[path[0]] = replace_at(kids[path[0]], path[1:], replacement)
    return _with_children(node, tuple(kids))
