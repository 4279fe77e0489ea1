#!/usr/bin/env python3
"""
Tests for graded Koszul homology, regularity certificates and Tor.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fractions import Fraction
from math import comb

import pytest

from app.utils import linalg
from app.utils.errors import DomainError, PreconditionError
from app.utils.koszul import (
    GradedRing,
    HomogeneousSequence,
    annihilation_check,
    chain_basis,
    differential,
    euler_identity_check,
    hilbert_function,
    hilbert_product_formula,
    homology_representatives,
    is_regular_up_to,
    koszul_homology,
    parse_sequence,
    tor_dimensions,
)


def test_graded_ring_dimensions():
    ring = GradedRing(3)
    assert ring.variable_names == ["x0", "x1", "x2"]
    assert [ring.dimension(t) for t in range(4)] == [1, 3, 6, 10]
    assert len(ring.monomials(2)) == 6


def test_parse_sequence():
    seq = parse_sequence(2, ["x0^2 - 3*x0*x1", "x1"])
    assert seq.degrees == (2, 1)
    assert seq.elements[0] == {(2, 0): Fraction(1), (1, 1): Fraction(-3)}
    assert seq.to_json() == ["x0^2 - 3*x0*x1", "x1"]


def test_parse_sequence_errors():
    with pytest.raises(DomainError):
        parse_sequence(2, ["x0 + x1^2"])
    with pytest.raises(DomainError):
        parse_sequence(2, ["y"])
    with pytest.raises(DomainError):
        parse_sequence(2, ["x0 - x0"])
    with pytest.raises(DomainError):
        parse_sequence(2, ["x0 +"])
    with pytest.raises(DomainError):
        HomogeneousSequence(GradedRing(2), ({(1, 0): 1},), (2,))


def test_variables_of_the_plane_are_regular():
    report = koszul_homology(parse_sequence(2, ["x0", "x1"]), 5)
    assert report.dims[0] == (1, 0, 0, 0, 0, 0)
    assert all(x == 0 for row in report.dims[1:] for x in row)
    assert report.chain_dims == ((1, 2, 3, 4, 5, 6), (0, 2, 4, 6, 8, 10), (0, 0, 1, 2, 3, 4))


def test_repeated_element_has_first_homology():
    report = koszul_homology(parse_sequence(1, ["x0", "x0"]), 6)
    assert report.dims[1] == (0, 1, 0, 0, 0, 0, 0)
    assert report.dims[2] == (0,) * 7
    assert not is_regular_up_to(report.sequence, 6, report)


def test_differential_squares_to_zero():
    seq = parse_sequence(3, ["x0^2", "x0*x1 + x2^2", "x1"])
    for t in range(6):
        for k in range(2, 4):
            assert linalg.is_zero(linalg.product(differential(seq, k - 1, t), differential(seq, k, t)))


def test_chain_basis_order():
    seq = parse_sequence(2, ["x0", "x1"])
    assert chain_basis(seq, 1, 1) == [
        ((0,), (0, 0)), ((1,), (0, 0)),
    ]


def test_regular_sequences_match_the_product_formula():
    for texts, num_vars in ((["x0^2", "x1^3"], 2), (["x0^2", "x1", "x2^2"], 3), (["x0 + x1", "x0 - x1"], 2)):
        seq = parse_sequence(num_vars, texts)
        report = koszul_homology(seq, 6)
        assert is_regular_up_to(seq, 6, report)
        assert hilbert_function(seq, 6, report) == hilbert_product_formula(seq.degrees, num_vars, 6)


def test_product_formula():
    assert hilbert_product_formula([2, 3], 2, 6) == [1, 2, 2, 1, 0, 0, 0]
    assert hilbert_product_formula([5], 1, 3) == [1, 1, 1, 1]


def test_euler_identity_holds_in_every_degree():
    seq = parse_sequence(2, ["x0^2", "x0*x1", "x1^2"])
    assert euler_identity_check(seq, 5)
    report = koszul_homology(seq, 5)
    for t in range(6):
        chain, homology = report.euler_sides(t)
        assert chain == homology


def test_permuting_the_sequence_keeps_homology():
    seq = parse_sequence(2, ["x0^2", "x0*x1", "x1"])
    assert koszul_homology(seq, 5).dims == koszul_homology(seq.permuted([2, 0, 1]), 5).dims


def test_parallel_degrees_match():
    seq = parse_sequence(3, ["x0*x1", "x1*x2", "x2"])
    assert koszul_homology(seq, 5, workers=3) == koszul_homology(seq, 5)


def test_tor_of_the_variables():
    seq = parse_sequence(3, ["x0", "x1", "x2"])
    tor = tor_dimensions(seq, 3)
    assert tor == [[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0], [0, 0, 0, 1]]


def test_tor_of_the_five_variables_of_p4():
    tor = tor_dimensions(parse_sequence(5, [f"x{i}" for i in range(5)]), 5)
    for k in range(6):
        assert tor[k][k] == comb(5, k)
        assert sum(tor[k]) == comb(5, k)


def test_tor_needs_regularity():
    with pytest.raises(PreconditionError):
        tor_dimensions(parse_sequence(1, ["x0", "x0"]), 4)


def test_homology_is_annihilated_by_the_ideal():
    xx = parse_sequence(1, ["x0", "x0"])
    assert len(homology_representatives(xx, 1, 1)) == 1
    assert annihilation_check(xx, 1, 5)
    monomials = parse_sequence(2, ["x0^2", "x0*x1", "x1^2"])
    assert annihilation_check(monomials, 1, 5)
    assert annihilation_check(monomials, 2, 5)
    with pytest.raises(DomainError):
        annihilation_check(xx, 0, 3)


def test_report_json_and_table():
    report = koszul_homology(parse_sequence(2, ["x0", "x1"]), 2)
    assert report.to_json() == {
        "vars": 2,
        "sequence": ["x0", "x1"],
        "degrees": [1, 1],
        "maxDegree": 2,
        "dims": [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
        "chainDims": [[1, 2, 3], [0, 2, 4], [0, 0, 1]],
    }
    table = report.to_table()
    assert "H_0" in table and "t=2" in table


def test_negative_degree_bound():
    with pytest.raises(DomainError):
        koszul_homology(parse_sequence(1, ["x0"]), -1)
