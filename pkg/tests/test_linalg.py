#!/usr/bin/env python3
"""
Tests for exact rank, kernel and span computations.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fractions import Fraction

import numpy as np
import pytest

from app.utils import linalg


def test_rank_of_sparse_and_numpy_input():
    m = linalg.sparse_matrix(3, 3, {(0, 0): 1, (1, 1): Fraction(1, 2), (2, 0): 2})
    assert linalg.rank(m) == 2
    array = np.array([[1, 2], [2, 4]], dtype=object)
    assert linalg.rank(array) == 1
    assert linalg.rank(linalg.sparse_matrix(0, 4)) == 0
    assert linalg.rank(linalg.sparse_matrix(4, 0)) == 0


def test_nullspace_vectors_are_killed():
    m = linalg.sparse_matrix(2, 3, {(0, 0): 1, (0, 1): 1, (1, 1): 1, (1, 2): -1})
    basis = linalg.nullspace(m)
    assert len(basis) == 1
    assert linalg.matmul(m, basis[0]) == [0, 0]
    assert any(basis[0])
    assert linalg.nullspace(linalg.sparse_matrix(0, 2)) == [[1, 0], [0, 1]]
    assert linalg.nullspace(linalg.sparse_matrix(2, 0)) == []


def test_span_and_products():
    m = linalg.sparse_matrix(3, 2, {(0, 0): 1, (1, 1): 1})
    assert linalg.in_span(m, [Fraction(3), Fraction(-1, 3), 0])
    assert not linalg.in_span(m, [0, 0, 1])
    assert linalg.in_span(linalg.sparse_matrix(3, 0), [0, 0, 0])
    assert linalg.shape(linalg.stack_columns(m, [[0, 0, 1]])) == (3, 3)
    square = linalg.product(m, linalg.sparse_matrix(2, 3, {(0, 0): 1, (1, 1): 1}))
    assert linalg.rank(square) == 2
    assert linalg.is_zero(linalg.product(linalg.sparse_matrix(3, 0), linalg.sparse_matrix(0, 2)))
    with pytest.raises(ValueError):
        linalg.product(m, m)
