#!/usr/bin/env python3
"""
Tests for the expression language: lexer, parser, printer, type checker and evaluator.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import random
from fractions import Fraction

import pytest

from app.models import Workspace
from app.utils.errors import EvaluationError, ParseError, TypeCheckError, UnknownIdentifier
from app.utils.exact_core import ChowClass
from app.utils.expression import (
    BUNDLE,
    CHOW,
    SCALAR,
    BinOp,
    Call,
    IntLit,
    Name,
    Neg,
    evaluate_text,
    lex,
    parse,
    print_expr,
    random_expression,
    typecheck,
    value_to_json,
    value_to_text,
)
from app.utils.riemann_roch import TrackedBundle


def run(text, n=2, workspace=None):
    _, kind, value = evaluate_text(text, workspace or Workspace.empty(n))
    return kind, value


def test_lexer_positions_are_one_based():
    tokens = lex("ch(O(3))")
    assert [t.typ for t in tokens] == ["Name", "LParen", "Name", "LParen", "Int", "RParen", "RParen", "EOF"]
    assert tokens[4].position == 6
    assert tokens[-1].position == 9


def test_parse_builds_the_expected_tree():
    assert parse("integral(ch(O(3)) * td(T))") == Call("integral", (
        BinOp("*", Call("ch", (Call("O", (IntLit(3),)),)), Call("td", (Name("T"),))),
    ))
    assert parse("O(-2)") == Call("O", (IntLit(-2),))
    assert parse("-H") == Neg(Name("H"))
    assert parse("1 - 2 * H") == BinOp("-", IntLit(1), BinOp("*", IntLit(2), Name("H")))


def test_spans_do_not_affect_equality():
    assert parse("  O( 1 )") == parse("O(1)")
    assert parse("ch(O(1))").args[0].span == (4, 8)


def test_syntax_errors_carry_positions():
    with pytest.raises(ParseError) as error:
        parse("chi(O(3)")
    assert error.value.position == 9
    assert "')'" in error.value.expected
    with pytest.raises(ParseError) as error:
        parse("O(3) +")
    assert error.value.position == 7
    with pytest.raises(ParseError) as error:
        parse("2 $ 3")
    assert error.value.position == 3


def test_printer_round_trips():
    for text in ("integral(ch(O(3)) * td(T))", "-(3) * H", "H - -2", "(H + 1) * (H - 1)", "c(2, sum(T, O(-1)))"):
        assert print_expr(parse(text)) == text
    assert print_expr(parse("1 - (2 - H)")) == "1 - (2 - H)"


def test_random_expressions_round_trip():
    rng = random.Random(7)
    for _ in range(200):
        expr = random_expression(rng, rng.randint(1, 6), ("E",))
        assert parse(print_expr(expr)) == expr


def test_type_checking():
    assert typecheck(parse("O(1)")) == BUNDLE
    assert typecheck(parse("td(T) * 2")) == CHOW
    assert typecheck(parse("rank(T) + 1")) == SCALAR
    with pytest.raises(TypeCheckError) as error:
        typecheck(parse("wedge(-1, O(1))"))
    assert error.value.position == 1
    with pytest.raises(TypeCheckError):
        typecheck(parse("O(1) + O(2)"))
    with pytest.raises(TypeCheckError):
        typecheck(parse("ch(1)"))
    with pytest.raises(TypeCheckError):
        typecheck(parse("tensor(O(1))"))
    with pytest.raises(UnknownIdentifier):
        typecheck(parse("ch(E)"))
    with pytest.raises(UnknownIdentifier):
        typecheck(parse("frob(T)"))


def test_evaluation_examples():
    assert run("chi(O(3))") == (SCALAR, 10)
    assert run("integral(ch(O(3)) * td(T))") == (SCALAR, 10)
    assert run("degree(det(sum(O(1), O(2))))") == (SCALAR, 3)
    assert run("rank(wedge(2, sum(O(1), O(1), O(1))))") == (SCALAR, 3)
    assert run("chi(dual(O(4)))", n=3) == (SCALAR, -1)
    assert run("td(T)") == (CHOW, ChowClass.from_parts(2, [1, Fraction(3, 2), 1]))


def test_chi_without_a_tracked_class_uses_the_integral():
    # wedge^2 T = Omega(4) on P^3; only the second form carries a K-class
    assert run("chi(wedge(2, T))", n=3) == (SCALAR, 45)
    assert run("chi(tensor(Omega, O(4)))", n=3) == (SCALAR, 45)


def test_chow_arithmetic():
    assert run("H * H * H") == (CHOW, ChowClass.zero(2))
    assert run("1 + H - c(1, O(3))") == (CHOW, ChowClass.from_parts(2, [1, -2]))
    assert run("segre(O(1)) * c(O(1))") == (CHOW, ChowClass.unit(2))


def test_workspace_bundles_are_visible():
    workspace = Workspace.empty(2)
    workspace.bundles["E"] = TrackedBundle.line(2, 1).sum(TrackedBundle.line(2, 2))
    assert run("chi(E)", workspace=workspace) == (SCALAR, 9)
    assert run("rank(tensor(E, E))", workspace=workspace) == (SCALAR, 4)


def test_evaluation_errors_carry_the_span():
    workspace = Workspace.empty(2)
    workspace.bundles["F"] = TrackedBundle.line(3, 1)
    with pytest.raises(EvaluationError) as error:
        run("rank(sum(O(1), F))", workspace=workspace)
    assert error.value.span == (6, 18)
    assert error.value.kind == "evaluation_error"


def test_values_serialize():
    kind, value = run("td(T)")
    assert value_to_json(kind, value) == {"type": "Chow", "value": ["1", "3/2", "1"]}
    assert value_to_text(kind, value) == "1 + 3/2*H + H^2"
    kind, value = run("chi(O(-5))")
    assert value_to_json(kind, value) == {"type": "Scalar", "value": "6"}
    kind, value = run("O(2)")
    assert value_to_json(kind, value)["value"]["chern"] == ["1", "2", "0"]
