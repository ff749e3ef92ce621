from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `oracles`

from textsynth.dsl import (
    CPos,
    Concat,
    ConstStr,
    RPos,
    SubStr,
    Token,
    TokenPattern,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
TASKS_DIR = REPO_ROOT / "tasks"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

SHRUNKEN_KINDS = ("digits", "alpha", "slash")
ALPHABET = "ab1/2c"


@pytest.fixture
def rng():
    return random.Random(20210914)


def random_pattern(rng: random.Random, kinds=SHRUNKEN_KINDS, max_len: int = 2) -> TokenPattern:
    length = rng.randint(0, max_len)
    tokens = [Token(rng.choice(kinds)) for _ in range(length)]
    if tokens and rng.random() < 0.15:
        tokens[0] = Token("start")
    if tokens and rng.random() < 0.15:
        tokens[-1] = Token("end")
    try:
        return TokenPattern(tuple(tokens))
    except ValueError:
        return TokenPattern(tuple(t for t in tokens if t.kind not in ("start", "end")))


def random_pos(rng: random.Random, kinds=SHRUNKEN_KINDS):
    if rng.random() < 0.4:
        return CPos(rng.randint(-6, 5))
    k = rng.choice([-2, -1, 1, 2])
    return RPos(random_pattern(rng, kinds), random_pattern(rng, kinds), k)


def random_atom(rng: random.Random, kinds=SHRUNKEN_KINDS):
    if rng.random() < 0.3:
        length = rng.randint(0, 3)
        return ConstStr("".join(rng.choice(ALPHABET) for _ in range(length)))
    return SubStr(random_pos(rng, kinds), random_pos(rng, kinds))


def random_program(rng: random.Random, max_parts: int = 3, kinds=SHRUNKEN_KINDS) -> Concat:
    parts = tuple(random_atom(rng, kinds) for _ in range(rng.randint(1, max_parts)))
    return Concat(parts)


def random_input(rng: random.Random, max_len: int = 8) -> str:
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, max_len)))


def evaluable_corpus(rng: random.Random, program, want: int = 2, attempts: int = 60,
                     max_len: int = 8) -> list[str] | None:
    """Inputs on which the program evaluates, or None if too few were found."""
    from textsynth.dsl import EvalError, evaluate

    found: list[str] = []
    for _ in range(attempts):
        text = random_input(rng, max_len)
        try:
            evaluate(program, text)
        except EvalError:
            continue
        found.append(text)
        if len(found) >= want:
            return found
    return None
