"""Emission of programs as standalone Python source.

The emitted module defines ``transform(x)`` returning the output string, or
``None`` when the program has no output for that input (the same inputs on
which the interpreter raises).  Emitted code is dependency-free: boundary
patterns compile to an inlined token scan, not to a regex library, so the
behavior of generated files is fixed by this module alone.

Emission is deterministic: byte-identical source for identical programs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsl import (
    CPos,
    Concat,
    ConstStr,
    FindPos,
    Node,
    PUNCT_CHARS,
    RPos,
    SubStr,
    Token,
    TokenPattern,
    subprograms,
)

__all__ = ["EmittedSource", "translate", "run_emitted"]

TARGET_PROFILE = "python3"

_SCAN_HELPERS = '''\
def _is(tag, c):
    if tag == "digits":
        return c.isdigit()
    if tag == "alpha":
        return c.isalpha()
    if tag == "lower":
        return c.isalpha() and c.islower()
    if tag == "upper":
        return c.isalpha() and c.isupper()
    if tag == "space":
        return c.isspace()
    return c == tag


def _match_end(x, toks, q):
    i = q
    for kind, arg in reversed(toks):
        if kind == "^":
            return i == 0
        if kind == "$":
            if i != len(x):
                return False
            continue
        if kind == "lit":
            j = i - len(arg)
            if j < 0 or x[j:i] != arg:
                return False
            i = j
            continue
        if i == 0 or not _is(arg, x[i - 1]):
            return False
        if i < len(x) and _is(arg, x[i]):
            return False
        j = i
        while j > 0 and _is(arg, x[j - 1]):
            j -= 1
        i = j
    return True


def _match_start(x, toks, q):
    i = q
    for kind, arg in toks:
        if kind == "$":
            return i == len(x)
        if kind == "^":
            if i != 0:
                return False
            continue
        if kind == "lit":
            j = i + len(arg)
            if x[i:j] != arg:
                return False
            i = j
            continue
        if i >= len(x) or not _is(arg, x[i]):
            return False
        if i > 0 and _is(arg, x[i - 1]):
            return False
        j = i
        while j < len(x) and _is(arg, x[j]):
            j += 1
        i = j
    return True


def _rpos(x, left, right, k):
    bs = [q for q in range(len(x) + 1)
          if _match_end(x, left, q) and _match_start(x, right, q)]
    if k > 0:
        if len(bs) < k:
            raise ValueError("boundary not found")
        return bs[k - 1]
    if len(bs) < -k:
        raise ValueError("boundary not found")
    return bs[len(bs) + k]
'''

_FIND_HELPER = '''\
def _find(x, needle, k, after):
    occ = []
    i = x.find(needle)
    while i != -1:
        occ.append(i)
        i = x.find(needle, i + 1)
    if k > 0:
        if len(occ) < k:
            raise ValueError("occurrence not found")
        p = occ[k - 1]
    else:
        if len(occ) < -k:
            raise ValueError("occurrence not found")
        p = occ[len(occ) + k]
    return p + len(needle) if after else p
'''


@dataclass(frozen=True)
class EmittedSource:
    text: str
    target_profile: str = TARGET_PROFILE


def _py_str(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\x{ord(ch):02x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _py_token(tok: Token) -> str:
    if tok.kind == "start":
        return '("^", "")'
    if tok.kind == "end":
        return '("$", "")'
    if tok.is_literal:
        return f'("lit", {_py_str(tok.text)})'
    tag = PUNCT_CHARS.get(tok.kind, tok.kind)
    return f'("c", {_py_str(tag)})'


def _py_pattern(pattern: TokenPattern) -> str:
    if not pattern.tokens:
        return "()"
    if len(pattern.tokens) == 1:
        return f"({_py_token(pattern.tokens[0])},)"
    return "(" + ", ".join(_py_token(t) for t in pattern.tokens) + ")"


class _Emitter:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self._temp = 0

    def stmt(self, text: str) -> None:
        self.lines.append("        " + text)

    def raise_if(self, condition: str, message: str) -> None:
        self.stmt(f"if {condition}:")
        self.lines.append(f'            raise ValueError("{message}")')

    def position(self, pos: Node, name: str) -> tuple[str, int | None]:
        """Emit setup for one position; returns (expression, static value)."""
        if isinstance(pos, CPos):
            if pos.index >= 0:
                self.raise_if(f"{pos.index} > n", "position out of range")
                return (str(pos.index), pos.index)
            if pos.index == -1:
                return ("n", None)
            offset = -(pos.index + 1)
            self.raise_if(f"n - {offset} < 0", "position out of range")
            return (f"n - {offset}", None)
        if isinstance(pos, RPos):
            self.stmt(
                f"{name} = _rpos(x, {_py_pattern(pos.left)}, "
                f"{_py_pattern(pos.right)}, {pos.occurrence})"
            )
            return (name, None)
        if isinstance(pos, FindPos):
            after = "True" if pos.side == "after" else "False"
            self.stmt(
                f"{name} = _find(x, {_py_str(pos.needle)}, {pos.occurrence}, {after})"
            )
            return (name, None)
        raise TypeError(f"not a position node: {pos!r}")

    def part(self, atom: Node, index: int) -> str:
        """Emit setup for one atom; returns the value expression."""
        if isinstance(atom, ConstStr):
            return _py_str(atom.text)
        if isinstance(atom, SubStr):
            start, s_static = self.position(atom.start, f"s{index}")
            end, e_static = self.position(atom.end, f"e{index}")
            if s_static is not None and e_static is not None:
                if s_static > e_static:
                    self.stmt('raise ValueError("empty span")')
            else:
                self.raise_if(f"{start} > {end}", "empty span")
            return f"x[{start}:{end}]"
        raise TypeError(f"not an atom node: {atom!r}")


def translate(program: Node) -> EmittedSource:
    """Emit a program as a Python module with a single transform function."""
    parts = program.parts if isinstance(program, Concat) else (program,)
    uses_rpos = any(isinstance(node, RPos) for _, node in subprograms(program))
    uses_find = any(isinstance(node, FindPos) for _, node in subprograms(program))
    needs_length = any(
        isinstance(node, (CPos, SubStr)) for _, node in subprograms(program)
    )

    emitter = _Emitter()
    if needs_length:
        emitter.stmt("n = len(x)")
    exprs = [emitter.part(atom, i) for i, atom in enumerate(parts)]
    if len(exprs) == 1:
        emitter.stmt(f"return {exprs[0]}")
    else:
        emitter.stmt("return " + " + ".join(exprs))

    blocks: list[str] = []
    if uses_rpos:
        blocks.append(_SCAN_HELPERS)
    if uses_find:
        blocks.append(_FIND_HELPER)
    body = "\n".join(emitter.lines)
    blocks.append(f"def transform(x):\n    try:\n{body}\n    except ValueError:\n        return None\n")
    return EmittedSource("\n\n".join(blocks))


def run_emitted(source: EmittedSource | str, text: str):
    """Execute emitted source on one input (testing hook; no isolation)."""
    code = source.text if isinstance(source, EmittedSource) else source
    namespace: dict = {}
    exec(compile(code, "<emitted>", "exec"), namespace)
    return namespace["transform"](text)
