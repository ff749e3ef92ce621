from __future__ import annotations

import pytest

from textsynth.dsl import (
    ALPHA,
    COLON,
    CPos,
    Concat,
    ConstStr,
    DIGITS,
    END,
    EvalError,
    FindPos,
    RPos,
    SLASH,
    SPACE,
    START,
    SubStr,
    Token,
    TokenPattern,
    boundaries,
    evaluate,
    grammar_symbol,
    node_at,
    replace_at,
    resolve_pos,
    size,
    subprograms,
)

from conftest import random_input, random_program
from oracles import boundaries_oracle, pattern_spans

FIG_INPUT = "06/08/2010 and 08/05/2010"


# --- evaluation ------------------------------------------------------------


def test_eval_constant_slice_extracts_second_date():
    assert evaluate(SubStr(CPos(15), CPos(25)), FIG_INPUT) == "08/05/2010"


def test_eval_conststr_ignores_input():
    assert evaluate(ConstStr("a"), "anything") == "a"


def test_eval_boundary_position():
    # "ab 12": the only space-run/digit-run boundary is at 3
    pos = RPos(TokenPattern((SPACE,)), TokenPattern((DIGITS,)), 1)
    assert resolve_pos(pos, "ab 12") == 3
    assert evaluate(SubStr(pos, CPos(-1)), "ab 12") == "12"


def test_eval_concat_concatenates():
    program = Concat((ConstStr("x"), SubStr(CPos(0), CPos(2)), ConstStr("y")))
    assert evaluate(program, "abc") == "xaby"


def test_cpos_negative_one_is_end_of_string():
    assert evaluate(SubStr(CPos(0), CPos(-1)), "hello") == "hello"
    assert resolve_pos(CPos(-1), "hello") == 5
    assert resolve_pos(CPos(-6), "hello") == 0


def test_findpos_sides_and_negative_occurrence():
    text = "one and two and three"
    assert resolve_pos(FindPos("and", 1, "before"), text) == 4
    assert resolve_pos(FindPos("and", 1, "after"), text) == 7
    assert resolve_pos(FindPos("and", -1, "before"), text) == 12
    assert evaluate(SubStr(FindPos("and", -1, "after"), CPos(-1)), text) == " three"


def test_findpos_overlapping_occurrences():
    assert resolve_pos(FindPos("aa", 2, "before"), "aaa") == 1


def test_eval_errors_carry_failing_node_path():
    program = Concat((ConstStr("x"), SubStr(CPos(99), CPos(-1))))
    with pytest.raises(EvalError) as err:
        evaluate(program, "short")
    assert err.value.path == (1, 0)

    with pytest.raises(EvalError) as err:
        evaluate(SubStr(CPos(3), CPos(1)), "abcdef")
    assert err.value.path == ()


def test_eval_error_when_boundary_occurrence_missing():
    pos = RPos(TokenPattern((SPACE,)), TokenPattern((DIGITS,)), 2)
    with pytest.raises(EvalError):
        resolve_pos(pos, "ab 12")


def test_unicode_indices_count_scalars():
    assert evaluate(SubStr(CPos(1), CPos(3)), "héllo") == "él"
    assert evaluate(SubStr(CPos(0), CPos(-1)), "çafé") == "çafé"


# --- token pattern semantics ------------------------------------------------


def test_class_tokens_match_maximal_runs_only():
    pat = TokenPattern((DIGITS,))
    # "a12b": digit run is [1, 3); neither endpoint inside the run qualifies
    assert pat.matches_starting_at("a12b", 1)
    assert not pat.matches_starting_at("a12b", 2)
    assert pat.matches_ending_at("a12b", 3)
    assert not pat.matches_ending_at("a12b", 2)


def test_empty_pattern_matches_everywhere():
    pat = TokenPattern(())
    for q in range(6):
        assert pat.matches_ending_at("hello", q)
        assert pat.matches_starting_at("hello", q)


def test_anchor_positions_are_validated():
    with pytest.raises(ValueError):
        TokenPattern((DIGITS, START))
    with pytest.raises(ValueError):
        TokenPattern((END, DIGITS))
    TokenPattern((START, END))  # degenerate but well-formed


def test_boundaries_match_oracle_on_random_inputs(rng):
    patterns = [
        TokenPattern(()),
        TokenPattern((DIGITS,)),
        TokenPattern((ALPHA,)),
        TokenPattern((SLASH,)),
        TokenPattern((START,)),
        TokenPattern((END,)),
        TokenPattern((ALPHA, DIGITS)),
        TokenPattern((DIGITS, SLASH)),
        TokenPattern((START, ALPHA)),
        TokenPattern((DIGITS, END)),
        TokenPattern((Token("lit", "b1"),)),
    ]
    for _ in range(120):
        text = random_input(rng)
        for left in patterns:
            for right in patterns:
                assert boundaries(text, left, right) == boundaries_oracle(
                    text, left, right
                ), (text, left, right)


def test_pattern_spans_agree_with_matchers(rng):
    pat = TokenPattern((ALPHA, DIGITS))
    for _ in range(60):
        text = random_input(rng)
        spans = pattern_spans(text, pat)
        ends = {b for _, b in spans}
        starts = {a for a, _ in spans}
        for q in range(len(text) + 1):
            assert pat.matches_ending_at(text, q) == (q in ends)
            assert pat.matches_starting_at(text, q) == (q in starts)


# --- size / subprograms / paths ---------------------------------------------


def test_size_counts_every_node_and_token():
    assert size(ConstStr("x")) == 1
    assert size(Concat((ConstStr("a"), SubStr(CPos(0), CPos(2))))) == 5
    # SubStr + RPos + 2 pattern tokens + CPos
    assert size(SubStr(RPos(TokenPattern((DIGITS,)), TokenPattern((SLASH,)), 1), CPos(-1))) == 5


def test_subprograms_preorder_and_identity_replacement():
    assert subprograms(ConstStr("a")) == [((), ConstStr("a"))]

    program = Concat((ConstStr("a"), SubStr(CPos(0), CPos(2))))
    entries = subprograms(program)
    assert len(entries) == 5
    assert entries[0] == ((), program)
    for path, node in entries:
        assert node_at(program, path) == node
        assert replace_at(program, path, node) == program


def test_subprograms_include_pattern_tokens():
    program = SubStr(RPos(TokenPattern((DIGITS,)), TokenPattern((SLASH, COLON)), 1), CPos(0))
    nodes = [node for _, node in subprograms(program)]
    assert DIGITS in nodes and SLASH in nodes and COLON in nodes
    assert len(nodes) == size(program)


def test_replace_at_rejects_other_grammar_symbols():
    program = Concat((SubStr(CPos(0), CPos(1)),))
    with pytest.raises(ValueError):
        replace_at(program, (0, 0), ConstStr("x"))  # a position cannot become an atom
    replaced = replace_at(program, (0, 0), CPos(3))
    assert node_at(replaced, (0, 0)) == CPos(3)


def test_replace_inside_token_pattern():
    program = SubStr(RPos(TokenPattern((DIGITS, SLASH)), TokenPattern((ALPHA,)), 1), CPos(0))
    replaced = replace_at(program, (0, 1), COLON)
    assert node_at(replaced, (0, 1)) == COLON
    assert grammar_symbol(node_at(replaced, (0,))) == "pos"


def test_invalid_nodes_are_rejected():
    with pytest.raises(ValueError):
        Concat(())
    with pytest.raises(ValueError):
        RPos(TokenPattern(()), TokenPattern(()), 0)
    with pytest.raises(ValueError):
        FindPos("", 1, "before")
    with pytest.raises(ValueError):
        FindPos("x", 1, "inside")
    with pytest.raises(ValueError):
        Token("widgets")


# --- invariants --------------------------------------------------------------


def test_eval_is_deterministic(rng):
    for _ in range(50):
        program = random_program(rng)
        text = random_input(rng)
        try:
            first = evaluate(program, text)
        except EvalError as err:
            with pytest.raises(EvalError) as again:
                evaluate(program, text)
            assert str(again.value) == str(err)
            continue
        assert evaluate(program, text) == first


def test_slice_coherence(rng):
    for _ in range(100):
        text = random_input(rng)
        a = rng.randint(0, len(text))
        b = rng.randint(a, len(text))
        assert evaluate(SubStr(CPos(a), CPos(b)), text) == text[a:b]


def test_rpos_occurrence_symmetry(rng):
    """With m boundaries, occurrences k and k-m-1 resolve identically."""
    pats = [TokenPattern(()), TokenPattern((DIGITS,)), TokenPattern((ALPHA,))]
    checked = 0
    for _ in range(200):
        text = random_input(rng)
        for left in pats:
            for right in pats:
                m = len(boundaries(text, left, right))
                for k in range(1, m + 1):
                    forward = resolve_pos(RPos(left, right, k), text)
                    backward = resolve_pos(RPos(left, right, k - m - 1), text)
                    assert forward == backward
                    checked += 1
    assert checked > 100


def test_findpos_occurrence_symmetry():
    text = "x/y/z/w"
    occurrences = 3
    for k in range(1, occurrences + 1):
        for side in ("before", "after"):
            assert resolve_pos(FindPos("/", k, side), text) == resolve_pos(
                FindPos("/", k - occurrences - 1, side), text
            )
