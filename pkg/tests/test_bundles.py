#!/usr/bin/env python3
"""
Tests for Chern, Todd and Segre classes of bundles on P^n.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fractions import Fraction

import pytest

from app.utils.bundles import (
    BundleClass,
    chern_character,
    chern_character_by_roots,
    chern_classes_by_roots,
    chern_from_segre,
    cotangent_bundle,
    degree,
    determinant,
    direct_sum,
    dual,
    line_bundle,
    power_sums,
    segre,
    sym,
    tangent_bundle,
    tensor,
    todd,
    todd_by_roots,
    trivial_bundle,
    twist,
    wedge,
)
from app.utils.errors import DomainError
from app.utils.exact_core import ChowClass, chow_inverse


def parts(n, *values):
    return ChowClass.from_parts(n, values)


@pytest.fixture
def e():
    """O(1) + O(2) on P^2."""
    return direct_sum(line_bundle(2, 1), line_bundle(2, 2))


def test_tangent_bundle_of_projective_space():
    assert tangent_bundle(2).chern == parts(2, 1, 3, 3)
    assert tangent_bundle(3).chern == parts(3, 1, 4, 6, 4)
    assert cotangent_bundle(2).chern == parts(2, 1, -3, 3)


def test_todd_class_of_the_plane():
    assert todd(tangent_bundle(2)) == parts(2, 1, Fraction(3, 2), 1)
    assert str(todd(tangent_bundle(2))) == "1 + 3/2*H + H^2"


def test_chern_character_of_line_and_tangent():
    assert chern_character(line_bundle(2, 3)) == parts(2, 1, 3, Fraction(9, 2))
    assert chern_character(tangent_bundle(2)) == parts(2, 2, 3, Fraction(3, 2))


def test_power_sums_start_with_rank(e):
    p = power_sums(e)
    assert p[0] == parts(2, 2)
    assert p[1] == parts(2, 0, 3)
    assert p[2] == parts(2, 0, 0, 5)


def test_whitney_sum(e):
    assert e.rank == 2
    assert e.chern == parts(2, 1, 3, 2)


def test_dual_and_determinant(e):
    assert dual(e).chern == parts(2, 1, -3, 2)
    assert dual(dual(e)) == e
    assert determinant(e) == line_bundle(2, 3)
    assert degree(e) == 3


def test_wedge_powers(e):
    assert wedge(2, e) == line_bundle(2, 3)
    assert wedge(0, e) == trivial_bundle(2)
    top = wedge(3, e)
    assert top.rank == 0 and top.chern == ChowClass.unit(2)
    assert wedge(2, tangent_bundle(3)).rank == 3
    with pytest.raises(DomainError):
        wedge(-1, e)


def test_symmetric_square(e):
    # roots 2, 3, 4
    s = sym(2, e)
    assert s.rank == 3
    assert s.chern == parts(2, 1, 9, 26)
    assert sym(0, e) == trivial_bundle(2)


def test_tensor_product(e):
    other = direct_sum(line_bundle(2, 1), line_bundle(2, -1))
    # roots 2, 0, 3, 1
    product = tensor(e, other)
    assert product.rank == 4
    assert product.chern == parts(2, 1, 6, 11)
    assert tensor(line_bundle(2, 2), line_bundle(2, -5)) == line_bundle(2, -3)
    assert twist(e, -1).chern == parts(2, 1, 1, 0)


def test_segre_inverts_chern(e):
    assert segre(line_bundle(2, 1)) == parts(2, 1, -1, 1)
    assert segre(e) * e.chern == ChowClass.unit(2)
    assert chern_from_segre(segre(e)) == e.chern


def test_multiplicativity_on_a_rank_three_sum():
    f = direct_sum(tangent_bundle(3), line_bundle(3, -2))
    g = twist(cotangent_bundle(3), 2)
    assert chern_character(direct_sum(f, g)) == chern_character(f) + chern_character(g)
    assert chern_character(tensor(f, line_bundle(3, 1))) == chern_character(f) * chern_character(line_bundle(3, 1))
    assert todd(direct_sum(f, g)) == todd(f) * todd(g)


def test_newton_path_agrees_with_root_path():
    bundle = BundleClass(4, 3, parts(4, 1, 2, -1, 5))
    assert chern_character(bundle) == chern_character_by_roots(bundle)
    assert todd(bundle) == todd_by_roots(bundle)
    assert chern_classes_by_roots(bundle) == bundle.chern


def test_alternating_wedge_sum(e):
    total = ChowClass.zero(2)
    for k in range(e.rank + 1):
        total = total + chern_character(wedge(k, e)).scale((-1) ** k)
    d = dual(e)
    assert total == d.c(e.rank) * chow_inverse(todd(d))


def test_invalid_bundles():
    with pytest.raises(DomainError):
        BundleClass(2, 1, parts(2, 1, 1, 1))
    with pytest.raises(DomainError):
        BundleClass(2, -1, parts(2, 1))
    with pytest.raises(DomainError):
        BundleClass(2, 1, parts(2, 2, 1))
    with pytest.raises(DomainError):
        direct_sum(line_bundle(2, 1), line_bundle(3, 1))
    with pytest.raises(DomainError):
        direct_sum()


def test_bundle_json():
    bundle = tangent_bundle(2)
    assert bundle.to_json() == {"ambient": 2, "rank": 2, "chern": ["1", "3", "3"]}
    assert BundleClass.from_json(bundle.to_json()) == bundle


def test_sym_square_of_two_copies_of_o1():
    s = sym(2, direct_sum(line_bundle(2, 1), line_bundle(2, 1)))
    assert s.rank == 3
    assert chern_character(s) == ChowClass.from_parts(2, [3, 6, 6])
