import math

import pytest
from hypothesis import given, settings, strategies as st

from stochgram.expr import (
    BinOp,
    Call,
    ExpressionError,
    Neg,
    Num,
    Pi,
    UnknownIdentifierError,
    Var,
    evaluate,
    evaluate_entry,
    parse_expression,
    to_source,
)


def test_constant():
    assert parse_expression("0") == Num(0.0)
    assert evaluate(parse_expression("0"), 7) == 0.0


def test_trigonometric_entries():
    assert evaluate(parse_expression("-1+sin(k*pi/18)"), 9) == pytest.approx(0.0, abs=1e-15)
    assert evaluate(parse_expression("cos(k*pi/18)"), 0) == 1.0


def test_precedence_and_associativity():
    assert evaluate(parse_expression("1-2-3"), 0) == -4
    assert evaluate(parse_expression("8/4/2"), 0) == 1
    assert evaluate(parse_expression("1+2*3"), 0) == 7
    assert evaluate(parse_expression("(1+2)*3"), 0) == 9
    assert parse_expression("-k*2") == BinOp("*", Neg(Var()), Num(2.0))
    assert evaluate(parse_expression("--2"), 0) == 2
    assert evaluate(parse_expression("2*-k"), 3) == -6
    assert evaluate(parse_expression("exp(0) + 1.5e1"), 0) == 16.0


def test_unicode_minus():
    assert evaluate(parse_expression("−1+k"), 1) == 0.0


@pytest.mark.parametrize(
    "text, offset",
    [("1+", 2), ("(1", 2), ("1 2", 2), ("sin 1", 4), ("", 0), ("1+*2", 2), ("k)", 1)],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ExpressionError) as info:
        parse_expression(text)
    assert info.value.offset == offset


def test_offset_is_in_bytes():
    with pytest.raises(ExpressionError) as info:
        parse_expression("−1+")
    assert info.value.offset == len("−1+".encode())


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse_expression("1 + tan(k)")
    assert info.value.offset == 4


def test_division_by_zero_at_evaluation():
    node = parse_expression("1/(k-2)")
    assert evaluate(node, 3) == 1.0
    with pytest.raises(ExpressionError):
        evaluate(node, 2)


def test_entries():
    assert evaluate_entry(3, 0) == 3.0
    assert evaluate_entry("k*k", 4) == 16.0
    with pytest.raises(ExpressionError):
        evaluate_entry(True, 0)
    with pytest.raises(ExpressionError):
        evaluate_entry("exp(k)", 1000)


leaves = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.just(Var()),
    st.just(Pi()),
)
trees = st.recursive(
    leaves,
    lambda sub: st.one_of(
        sub.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/"), sub, sub),
        st.builds(Call, st.sampled_from(["sin", "cos", "exp"]), sub),
    ),
    max_leaves=12,
)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_print_reparse_roundtrip(tree):
    assert parse_expression(to_source(tree)) == tree
