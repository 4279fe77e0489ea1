#!/usr/bin/env python3
"""
Tests for K_0(P^n), its Euler characteristic and Chern character.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fractions import Fraction
from math import comb

import pytest

from app.utils.errors import DomainError
from app.utils.exact_core import ChowClass
from app.utils.ktheory import (
    KClass,
    ch_map,
    ch_matrix,
    ch_matrix_rank,
    euler_char,
    euler_char_of_polynomial,
    k_alternating_sum,
    k_dual,
    k_dual_line_from_koszul,
    k_from_coeffs,
    k_line,
    k_one,
    k_pow,
    k_rank,
    k_tangent,
    k_zero,
)


def test_line_classes_on_the_basis():
    assert k_line(1, -1).coeffs == (2, -1)
    assert k_line(2, 3).coeffs == (1, -3, 3)
    assert str(k_line(2, 3)) == "1 - 3*xi + 3*xi^2"


def test_relation_vanishes():
    for n in range(1, 6):
        relation = [(-1) ** j * comb(n + 1, j) for j in range(n + 2)]
        assert k_from_coeffs(n, relation).is_zero()


def test_xi_is_a_unit():
    for n in range(1, 6):
        assert k_line(n, 1) * k_line(n, -1) == k_one(n)
        assert k_line(n, 2) * k_line(n, -5) == k_line(n, -3)


def test_euler_characteristic_of_lines():
    assert euler_char(k_line(2, 3)) == 10
    assert euler_char(k_line(2, -3)) == 1
    assert euler_char(k_line(3, -4)) == -1
    assert all(euler_char(k_line(4, d)) == 0 for d in range(-4, 0))


def test_euler_characteristic_of_tangent():
    assert k_tangent(2).coeffs == (-1, 3, 0)
    assert euler_char(k_tangent(2)) == 8
    assert k_rank(k_tangent(3)) == 3


def test_euler_char_kills_the_relation():
    n = 3
    relation = [(-1) ** j * comb(n + 1, j) for j in range(n + 2)]
    for m in range(n + 1):
        assert euler_char_of_polynomial(n, [0] * m + relation) == 0


def test_dual_is_an_involution():
    a = k_from_coeffs(3, [2, -1, 0, 4])
    assert k_dual(k_dual(a)) == a
    assert k_dual(k_line(3, 2)) == k_line(3, -2)


def test_koszul_class_of_the_dual_line():
    for n in range(1, 7):
        assert k_dual_line_from_koszul(n) == k_line(n, -1)


def test_alternating_sum_of_the_euler_sequence():
    # 0 -> O -> O(1)^3 -> T -> 0 on P^2
    n = 2
    sequence = [k_one(n), k_line(n, 1) * k_from_coeffs(n, [3]), k_tangent(n)]
    assert k_alternating_sum(sequence) == k_zero(n)
    with pytest.raises(DomainError):
        k_alternating_sum([])


def test_chern_character_map():
    assert ch_map(k_line(2, 1)) == ChowClass.from_parts(2, [1, 1, Fraction(1, 2)])
    a, b = k_from_coeffs(2, [1, 2, -1]), k_from_coeffs(2, [0, -3, 1])
    assert ch_map(a * b) == ch_map(a) * ch_map(b)
    assert ch_map(a + b) == ch_map(a) + ch_map(b)


def test_chern_character_is_injective():
    assert ch_matrix(2)[:, 2].tolist() == [1, 2, 2]
    for n in range(1, 7):
        assert ch_matrix_rank(n) == n + 1


def test_invalid_classes():
    with pytest.raises(DomainError):
        KClass(2, (1, 2))
    with pytest.raises(DomainError):
        KClass(2, (1, Fraction(1, 2), 0))
    with pytest.raises(DomainError):
        k_pow(k_line(2, 1), -1)
    with pytest.raises(DomainError):
        k_line(2, 1) + k_line(3, 1)


def test_json():
    a = k_line(2, 3)
    assert a.to_json() == {"ambient": 2, "coeffs": [1, -3, 3]}
    assert KClass.from_json(a.to_json()) == a
