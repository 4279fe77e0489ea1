#!/usr/bin/env python3
"""
Tests for HRR on P^n, chi tables, and Riemann-Roch on curves and surfaces.
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fractions import Fraction

import pytest

from app.utils.bundles import tangent_bundle
from app.utils.errors import (
    DomainError,
    InconsistentContextError,
    InvariantViolation,
    UnsupportedInputError,
)
from app.utils.exact_core import ChowClass
from app.utils.ktheory import k_line
from app.utils.riemann_roch import (
    HrrReport,
    SurfaceContext,
    TrackedBundle,
    chi_table,
    chi_table_frame,
    cohomology_oracle,
    curve_chi,
    curve_chi_via_todd,
    curve_context,
    hrr_check,
    hrr_rhs,
    hrr_rhs_residue,
    noether_chi,
    surface_chi,
    surface_chi_via_todd,
    surface_context_p2,
    todd_of_projective_space,
)

QUADRIC = SurfaceContext(("A", "B"), ((0, 1), (1, 0)), (-2, -2), 4, name="Quadric")


def test_todd_of_projective_space():
    assert todd_of_projective_space(2) == ChowClass.from_parts(2, [1, Fraction(3, 2), 1])
    for n in range(1, 8):
        assert todd_of_projective_space(n)[n] == 1


def test_hrr_for_a_line_bundle():
    report = hrr_check(TrackedBundle.line(4, 2))
    assert report.to_json() == {"lhs": 15, "rhs": "15", "equal": True}


def test_hrr_for_tangent_cotangent_and_sums():
    for n in range(1, 6):
        assert hrr_check(TrackedBundle.tangent(n)).equal
        assert hrr_check(TrackedBundle.cotangent(n)).equal
    e = TrackedBundle.line(3, 2).sum(TrackedBundle.tangent(3)).tensor(TrackedBundle.line(3, -1))
    report = hrr_check(e)
    assert report.equal and report.lhs == report.rhs


def test_cotangent_of_the_line_has_chi_minus_one():
    # Omega_P1 = O(-2)
    assert hrr_check(TrackedBundle.cotangent(1)).lhs == -1


def test_hrr_needs_a_tracked_class():
    with pytest.raises(UnsupportedInputError):
        hrr_check(TrackedBundle.untracked(tangent_bundle(2)))
    with pytest.raises(DomainError):
        hrr_check(TrackedBundle.line(2, 1).bundle, k_line(3, 1))
    with pytest.raises(DomainError):
        hrr_check(TrackedBundle.line(2, 1).bundle, k_line(2, 1) + k_line(2, 1))


def test_inconsistent_report_is_rejected():
    with pytest.raises(InvariantViolation):
        HrrReport(lhs=3, rhs=Fraction(3), equal=False)


def test_three_routes_to_chi_of_a_line():
    assert hrr_rhs(TrackedBundle.line(2, 3).bundle) == 10
    assert hrr_rhs_residue(2, 3) == 10
    assert hrr_rhs_residue(3, -4) == -1
    assert cohomology_oracle(3, -4) == -1
    assert cohomology_oracle(2, -2) == 0


def test_chi_table_on_the_plane():
    rows = chi_table(2, -3, 3)
    assert [row.k_theory for row in rows] == [1, 0, 0, 1, 3, 6, 10]
    assert rows[0].to_json() == {"d": -3, "chi": 1, "integral": "1", "oracle": 1, "residue": "1"}
    assert all(row.consistent for row in rows)


def test_chi_table_in_parallel_matches():
    assert chi_table(4, -7, 6, workers=4) == chi_table(4, -7, 6)


def test_chi_table_frame():
    frame = chi_table_frame(chi_table(1, -1, 1))
    assert list(frame.columns) == ["d", "chi", "integral", "oracle", "residue"]
    assert frame["chi"].tolist() == [0, 1, 2]


def test_chi_table_rejects_an_empty_range():
    with pytest.raises(DomainError):
        chi_table(2, 3, 1)


def test_curve_riemann_roch():
    ctx = curve_context(2)
    assert curve_chi(ctx, 2, 5) == 3
    assert curve_chi_via_todd(ctx, 2, 5) == 3
    assert curve_chi(curve_context(0), 1, -1) == 0
    with pytest.raises(DomainError):
        curve_context(-1)
    with pytest.raises(DomainError):
        curve_chi(ctx, -1, 0)


def test_surface_riemann_roch_on_the_plane():
    p2 = surface_context_p2()
    assert noether_chi(p2) == 1
    assert surface_chi(p2, [3]) == 10
    assert surface_chi(p2, [-3]) == 1
    assert surface_chi_via_todd(p2, [3]) == 10


def test_surface_riemann_roch_on_the_quadric():
    assert noether_chi(QUADRIC) == 1
    for a in range(-2, 3):
        for b in range(-2, 3):
            assert surface_chi(QUADRIC, [a, b]) == (a + 1) * (b + 1)
            assert surface_chi_via_todd(QUADRIC, [a, b]) == (a + 1) * (b + 1)


def test_inconsistent_surfaces():
    with pytest.raises(InconsistentContextError):
        noether_chi(SurfaceContext(("H",), ((1,),), (-3,), 4))
    odd = SurfaceContext(("H",), ((1,),), (0,), 12)
    with pytest.raises(InconsistentContextError):
        surface_chi(odd, [1])
    with pytest.raises(DomainError):
        SurfaceContext(("A", "B"), ((0, 1), (2, 0)), (0, 0), 12)
    with pytest.raises(DomainError):
        surface_chi(QUADRIC, [1])
