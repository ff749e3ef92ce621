"""Stable textual program format (s-expressions).

Round-trip guarantee: ``parse(serialize(p)) == p``.  The format is an
external interface; golden files depend on the exact rendering, so any
change here is a compatibility break.

Integers always carry an explicit sign, so among rank- and size-equal
programs the lexicographic tie-break prefers from-start positions and
forward occurrence counting ('+' orders before '-').

Examples::

    (concat (conststr "a") (substr (cpos +15) (cpos +25)))
    (substr (rpos (tokens space) (tokens digits) +1) (cpos -1))
    (findpos "and" +1 after)
"""

from __future__ import annotations

from .dsl import (
    CPos,
    Concat,
    ConstStr,
    FindPos,
    Node,
    RPos,
    SubStr,
    Token,
    TokenPattern,
)

__all__ = ["serialize", "parse", "ParseError"]

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def _quote(text: str) -> str:
    out = ['"']
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _serialize_token(tok: Token) -> str:
    if tok.is_literal:
        return f"(lit {_quote(tok.text)})"
    return tok.kind


def _serialize_pattern(pat: TokenPattern) -> str:
    inner = " ".join(_serialize_token(t) for t in pat.tokens)
    return f"(tokens {inner})" if inner else "(tokens)"


def _int(value: int) -> str:
    return f"+{value}" if value >= 0 else str(value)


def serialize(node: Node) -> str:
    if isinstance(node, Concat):
        return "(concat " + " ".join(serialize(p) for p in node.parts) + ")"
    if isinstance(node, ConstStr):
        return f"(conststr {_quote(node.text)})"
    if isinstance(node, SubStr):
        return f"(substr {serialize(node.start)} {serialize(node.end)})"
    if isinstance(node, CPos):
        return f"(cpos {_int(node.index)})"
    if isinstance(node, RPos):
        return (
            f"(rpos {_serialize_pattern(node.left)} "
            f"{_serialize_pattern(node.right)} {_int(node.occurrence)})"
        )
    if isinstance(node, FindPos):
        return f"(findpos {_quote(node.needle)} {_int(node.occurrence)} {node.side})"
    if isinstance(node, Token):
        return _serialize_token(node)
    raise TypeError(f"cannot serialize {node!r}")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self._advance()

    def next(self) -> tuple[str, str] | None:
        """Next token as (kind, value); kinds: lparen rparen string word."""
        self._skip_ws()
        if self.pos >= len(self.text):
            return None
        ch = self.text[self.pos]
        if ch == "(":
            self._advance()
            return ("lparen", "(")
        if ch == ")":
            self._advance()
            return ("rparen", ")")
        if ch == '"':
            return ("string", self._string())
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace() and self.text[
            self.pos
        ] not in '()"':
            self._advance()
        if self.pos == start:
            raise self.error(f"unexpected character {ch!r}")
        return ("word", self.text[start : self.pos])

    def _string(self) -> str:
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == '"':
                self._advance()
                return "".join(out)
            if ch == "\\":
                self._advance()
                if self.pos >= len(self.text):
                    raise self.error("unterminated escape")
                esc = self.text[self.pos]
                if esc in _UNESCAPES:
                    out.append(_UNESCAPES[esc])
                    self._advance()
                elif esc == "u":
                    self._advance()
                    hexs = self.text[self.pos : self.pos + 4]
                    if len(hexs) != 4:
                        raise self.error("truncated \\u escape")
                    try:
                        out.append(chr(int(hexs, 16)))
                    except ValueError:
                        raise self.error(f"bad \\u escape {hexs!r}") from None
                    self._advance(4)
                else:
                    raise self.error(f"unknown escape \\{esc}")
            else:
                out.append(ch)
                self._advance()


def _read_form(lx: _Lexer):
    tok = lx.next()
    if tok is None:
        raise lx.error("unexpected end of input")
    kind, value = tok
    if kind == "lparen":
        items = []
        while True:
            save = (lx.pos, lx.line, lx.col)
            nxt = lx.next()
            if nxt is None:
                raise lx.error("missing closing parenthesis")
            if nxt[0] == "rparen":
                return items
            lx.pos, lx.line, lx.col = save
            items.append(_read_form(lx))
    if kind == "rparen":
        raise lx.error("unexpected ')'")
    if kind == "string":
        return ("str", value)
    return ("word", value)


def _expect_int(form, lx: _Lexer) -> int:
    if isinstance(form, tuple) and form[0] == "word":
        try:
            return int(form[1])
        except ValueError:
            pass
    raise lx.error(f"expected integer, got {form!r}")


def _expect_str(form, lx: _Lexer) -> str:
    if isinstance(form, tuple) and form[0] == "str":
        return form[1]
    raise lx.error(f"expected string literal, got {form!r}")


def _build_token(form, lx: _Lexer) -> Token:
    if isinstance(form, tuple) and form[0] == "word":
        try:
            return Token(form[1])
        except ValueError as exc:
            raise lx.error(str(exc)) from None
    if isinstance(form, list) and form and form[0] == ("word", "lit"):
        if len(form) != 2:
            raise lx.error("lit takes exactly one string")
        return Token("lit", _expect_str(form[1], lx))
    raise lx.error(f"expected token, got {form!r}")


def _build_pattern(form, lx: _Lexer) -> TokenPattern:
    if not (isinstance(form, list) and form and form[0] == ("word", "tokens")):
        raise lx.error(f"expected (tokens ...), got {form!r}")
    try:
        return TokenPattern(tuple(_build_token(f, lx) for f in form[1:]))
    except ValueError as exc:
        raise lx.error(str(exc)) from None


def _build(form, lx: _Lexer) -> Node:
    if not (isinstance(form, list) and form and isinstance(form[0], tuple)):
        raise lx.error(f"expected a form, got {form!r}")
    head = form[0][1]
    args = form[1:]
    try:
        if head == "concat":
            if not args:
                raise lx.error("concat requires at least one part")
            return Concat(tuple(_build(a, lx) for a in args))  # type: ignore[arg-type]
        if head == "conststr":
            if len(args) != 1:
                raise lx.error("conststr takes one string")
            return ConstStr(_expect_str(args[0], lx))
        if head == "substr":
            if len(args) != 2:
                raise lx.error("substr takes two positions")
            return SubStr(_build(args[0], lx), _build(args[1], lx))  # type: ignore[arg-type]
        if head == "cpos":
            if len(args) != 1:
                raise lx.error("cpos takes one integer")
            return CPos(_expect_int(args[0], lx))
        if head == "rpos":
            if len(args) != 3:
                raise lx.error("rpos takes two patterns and an occurrence")
            return RPos(
                _build_pattern(args[0], lx),
                _build_pattern(args[1], lx),
                _expect_int(args[2], lx),
            )
        if head == "findpos":
            if len(args) != 3:
                raise lx.error("findpos takes needle, occurrence, side")
            side = args[2]
            if not (isinstance(side, tuple) and side[0] == "word"):
                raise lx.error("findpos side must be before or after")
            return FindPos(_expect_str(args[0], lx), _expect_int(args[1], lx), side[1])
    except ParseError:
        raise
    except ValueError as exc:
        raise lx.error(str(exc)) from None
    raise lx.error(f"unknown form {head!r}")


def parse(text: str) -> Node:
    """Parse a serialized program; raises ParseError with line/column."""
    lx = _Lexer(text)
    form = _read_form(lx)
    node = _build(form, lx)
    trailing = lx.next()
    if trailing is not None:
        raise lx.error(f"trailing content {trailing[1]!r}")
    return node
