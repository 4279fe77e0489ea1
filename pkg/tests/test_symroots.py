#!/usr/bin/env python3
"""
Tests for symmetric-function reduction of polynomials in Chern roots.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fractions import Fraction

import pytest
import sympy
from sympy.polys.polyfuncs import symmetrize

from app.utils.bundles import direct_sum, line_bundle
from app.utils.errors import DomainError
from app.utils.exact_core import ChowClass
from app.utils.symroots import (
    ElementaryExpansion,
    MultiPoly,
    RootGroup,
    check_symmetric,
    elementary_symmetric,
    evaluate_universal,
    power_sum,
    product_over_roots,
    reduce_to_elementaries,
    root_forms,
    subset_sums,
)

A3 = RootGroup("a", 3)


def test_power_sum_two_reduces_to_e1_squared_minus_two_e2():
    expansion = reduce_to_elementaries(power_sum(2, A3, (A3,), 2))
    assert expansion.terms == {((2, 0, 0),): Fraction(1), ((0, 1, 0),): Fraction(-2)}


def test_power_sum_three():
    # p_3 = e1^3 - 3 e1 e2 + 3 e3
    expansion = reduce_to_elementaries(power_sum(3, A3, (A3,), 3))
    assert expansion.terms == {
        ((3, 0, 0),): Fraction(1),
        ((1, 1, 0),): Fraction(-3),
        ((0, 0, 1),): Fraction(3),
    }


def test_expand_inverts_reduction():
    groups = (A3,)
    e1 = elementary_symmetric(1, A3, groups, 4)
    e2 = elementary_symmetric(2, A3, groups, 4)
    p = e1 * e1 * e2 + e2.scale(Fraction(5, 2))
    assert reduce_to_elementaries(p).expand() == p


def test_non_symmetric_input_names_the_transposition():
    a1 = MultiPoly.root((A3,), 2, 0, 0)
    with pytest.raises(DomainError, match="a1"):
        check_symmetric(a1)
    with pytest.raises(DomainError):
        reduce_to_elementaries(a1 * a1)


def test_two_groups_reduce_independently():
    a, b = RootGroup("a", 2), RootGroup("b", 2)
    groups = (a, b)
    # prod (1 + a_i + b_j) is symmetric in each group separately
    roots = [x + y for x in root_forms(groups, 2, 0) for y in root_forms(groups, 2, 1)]
    expansion = reduce_to_elementaries(product_over_roots(groups, 2, roots))
    assert expansion.expand() == product_over_roots(groups, 2, roots)
    # O(1)+O(2) tensor O(0)+O(1) has roots 1, 2, 2, 3
    first = direct_sum(line_bundle(2, 1), line_bundle(2, 2))
    second = direct_sum(line_bundle(2, 0), line_bundle(2, 1))
    assert evaluate_universal(expansion, [first, second]) == ChowClass.from_parts(2, [1, 8, 23])


def test_evaluate_universal_respects_sums_and_products():
    a, b = RootGroup("a", 2), RootGroup("b", 1)
    groups = (a, b)
    f = ElementaryExpansion(groups, 3, {((1, 0), (0,)): Fraction(1, 2), ((0, 1), (1,)): -3, ((0, 0), (0,)): 2})
    g = ElementaryExpansion(groups, 3, {((2, 0), (0,)): 1, ((0, 0), (1,)): Fraction(-5, 3)})
    bundles = [direct_sum(line_bundle(3, 1), line_bundle(3, -2)), line_bundle(3, 2)]
    assert evaluate_universal(f * g, bundles) == evaluate_universal(f, bundles) * evaluate_universal(g, bundles)
    assert evaluate_universal(f + g, bundles) == evaluate_universal(f, bundles) + evaluate_universal(g, bundles)


def test_evaluate_universal_checks_ranks():
    expansion = reduce_to_elementaries(power_sum(2, A3, (A3,), 2))
    with pytest.raises(DomainError):
        evaluate_universal(expansion, [line_bundle(2, 1)])


def test_truncation_drops_high_degrees():
    e1 = elementary_symmetric(1, A3, (A3,), 2)
    assert (e1 ** 3).is_zero()
    expansion = ElementaryExpansion((A3,), 2, {((3, 0, 0),): 1, ((1, 0, 0),): 2})
    assert expansion.terms == {((1, 0, 0),): Fraction(2)}


def test_subset_sums():
    forms = root_forms((A3,), 3, 0)
    assert len(subset_sums(forms, 2)) == 3
    assert len(subset_sums(forms, 2, repeat=True)) == 6
    assert subset_sums(forms, 0) == []


def test_elementary_symmetric_bounds():
    with pytest.raises(DomainError):
        elementary_symmetric(4, A3)
    with pytest.raises(DomainError):
        power_sum(-1, A3)


def test_power_sum_four_agrees_with_sympy_symmetrize():
    a1, a2, a3 = sympy.symbols('a1 a2 a3')
    symmetric, remainder, names = symmetrize(a1 ** 4 + a2 ** 4 + a3 ** 4, formal=True)
    assert remainder == 0
    s = [name for name, _ in names]
    expansion = reduce_to_elementaries(power_sum(4, A3, (A3,), 4))
    ours = sum(
        sympy.Rational(c.numerator, c.denominator) * s[0] ** m[0][0] * s[1] ** m[0][1] * s[2] ** m[0][2]
        for m, c in expansion.terms.items()
    )
    assert sympy.expand(ours - symmetric) == 0
