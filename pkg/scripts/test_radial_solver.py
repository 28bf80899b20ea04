"""
Test script for the radial Navier solver
Grid construction, Poisson and biharmonic solves, closed-form projections and the Robin function

Usage: Run from project root directory
    python scripts/test_radial_solver.py
"""

import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from src.bubble import bubble_radial
from src.constants import alpha_n, make_dims
from src.errors import DomainError, RegimeError
from src.quadrature import QuadratureEngine
from src.radial_solver import (NavierCorrection, RadialField, RadialGrid, expansion_decompose,
                               hole_coefficients, navier_projection, poisson_solve_radial,
                               project_bubble, project_z0, pz_inner_products, robin_coefficients,
                               robin_function, sample_field)


def _grid(N=5, eps=1e-3, mu=0.5, nodes=512):
    return RadialGrid.log_graded(N, eps, nodes, 1.0, focus_scales=(mu,))


def test_log_graded_grid():
    grid = _grid()
    assert grid.nodes[0] == 1e-3
    assert grid.nodes[-1] == 1.0
    assert np.all(np.diff(grid.nodes) > 0)
    assert len(grid) >= 512
    ok, reason = grid.resolves(0.5)
    assert ok and reason is None


def test_grid_validation():
    with pytest.raises(DomainError):
        RadialGrid(5, 0.1, np.array([0.1, 0.05, 1.0]))
    with pytest.raises(DomainError):
        RadialGrid(5, 0.2, np.array([0.1, 1.0]))
    with pytest.raises(DomainError):
        RadialGrid.log_graded(5, 1e-3, 100)
    with pytest.raises(DomainError):
        RadialGrid.log_graded(5, 2.0, 512)


def test_coarse_grid_does_not_resolve_a_tiny_scale():
    grid = RadialGrid(5, 1e-6, np.geomspace(1e-6, 1.0, 20))
    ok, reason = grid.resolves(1e-3)
    assert not ok
    assert "1.000e-03" in reason


def test_poisson_solve_constant_source():
    # Δw = 2N with w(ε) = w(R) = 0: w = r² + c + d r^{2-N}
    N, eps = 5, 0.01
    grid = RadialGrid.log_graded(N, eps, 256)
    lhs = np.array([[1.0, eps ** (2 - N)], [1.0, 1.0]])
    c, d = np.linalg.solve(lhs, [-eps ** 2, -1.0])
    exact = lambda r: r ** 2 + c + d * r ** (2 - N)

    field = poisson_solve_radial(lambda r: np.full_like(r, 2.0 * N), grid)
    assert field.resolved
    np.testing.assert_allclose(field.values, exact(grid.nodes), atol=1e-12)
    radii = np.array([0.0123, 0.2, 0.77])
    np.testing.assert_allclose(field(radii), exact(radii), atol=1e-12)


def test_quadrature_projection_matches_closed_form():
    dims = make_dims(5, 1)
    grid = _grid()
    quad = QuadratureEngine()
    exact = project_bubble(dims, 0.5, grid, quad, method="exact")
    solved = project_bubble(dims, 0.5, grid, quad, method="quadrature")
    scale = exact.sup_norm()
    np.testing.assert_allclose(solved.values, exact.values, atol=1e-8 * scale)
    np.testing.assert_allclose(solved.laplacian.values, exact.laplacian.values,
                               atol=1e-8 * exact.laplacian.sup_norm())


def test_projection_navier_conditions():
    dims = make_dims(6, 1)
    projection = navier_projection(dims, 0.3, 1e-3)
    scale = float(bubble_radial(dims, 0.3, 0.0))
    for r in (1e-3, 1.0):
        assert abs(projection.value(r)) < 1e-12 * scale
        assert abs(projection.laplacian(r)) < 1e-10 * abs(projection.laplacian(0.3))


def test_projection_lies_between_zero_and_bubble():
    dims = make_dims(5, 1)
    grid = _grid(mu=0.2)
    field = project_bubble(dims, 0.2, grid)
    bubble = bubble_radial(dims, 0.2, grid.nodes)
    inner = slice(1, -1)
    assert np.all(field.values[inner] > -1e-12)
    assert np.all(field.values[inner] <= bubble[inner])


def test_navier_correction_boundary_data():
    h = NavierCorrection.from_inner_data(7, 0.01, 1.0, value=2.5, laplacian=-4.0)
    assert h.value(0.01) == pytest.approx(2.5, rel=1e-12)
    assert h.laplacian(0.01) == pytest.approx(-4.0, rel=1e-12)
    assert abs(h.value(1.0)) < 1e-12
    assert abs(h.laplacian(1.0)) < 1e-12
    assert h.value_offset(0.01) == 0.0


def test_z0_projection_inner_products_agree():
    dims = make_dims(5, 1)
    energy, source = pz_inner_products(dims, 0.4, 1e-3, QuadratureEngine())
    assert energy.value > 0
    assert energy.value == pytest.approx(source.value, rel=1e-6)


def test_z0_projection_field():
    dims = make_dims(5, 1)
    field = project_z0(dims, 0.4, _grid(mu=0.4))
    assert field.label == "PZ0"
    assert abs(field.values[0]) < 1e-10 * field.sup_norm()
    assert abs(field.values[-1]) < 1e-10 * field.sup_norm()


def test_robin_function_on_unit_ball():
    for N in (5, 6, 7, 8):
        assert robin_function(N) == pytest.approx(2.0 * (N - 2) / N, rel=1e-6)
        a, b = robin_coefficients(N)
        assert b == pytest.approx((4.0 - N) / N)
    # homogeneity: H_R(0,0) = R^{4-N} H_1(0,0)
    assert robin_function(6, 2.0) == pytest.approx(robin_function(6) / 4.0)
    with pytest.raises(DomainError):
        robin_function(4)


def test_expansion_outer_defect_is_small():
    dims = make_dims(5, 1)
    mu, eps = 0.01, 1e-4
    grid = RadialGrid.log_graded(5, eps, 512, focus_scales=(mu,))
    expansion = expansion_decompose(dims, mu, grid)
    assert expansion.outer_defect.sup_norm() < 1e-3 * alpha_n(5) * mu ** dims.m
    a1, a2 = hole_coefficients(dims, mu, eps)
    assert expansion.a1 == a1 and expansion.a2 == a2
    assert a1 > 0 and a2 > 0
    assert np.isfinite(expansion.envelope_ratio())


def test_expansion_requires_small_hole():
    dims = make_dims(5, 1)
    grid = RadialGrid.log_graded(5, 0.05, 256)
    with pytest.raises(RegimeError):
        expansion_decompose(dims, 0.1, grid)


def test_field_helpers():
    grid = RadialGrid.log_graded(5, 0.01, 256)
    one = sample_field(grid, lambda r: r ** 2, "one")
    two = sample_field(grid, lambda r: 2.0 * r ** 2, "two")
    diff = two.combine(one, sign=-1.0, label="diff")
    np.testing.assert_allclose(diff.values, one.values)
    assert diff(0.5) == pytest.approx(0.25)
    frame = diff.to_frame()
    assert list(frame.columns) == ["r", "diff"]
    with pytest.raises(DomainError):
        RadialField(grid, np.full(len(grid), np.nan))
    other = sample_field(RadialGrid.log_graded(5, 0.02, 256), lambda r: r)
    with pytest.raises(DomainError):
        one.combine(other)


def test_grid_dimension_mismatch():
    with pytest.raises(DomainError):
        project_bubble(make_dims(6, 1), 0.5, _grid(N=5))


def main():
    print("=" * 70)
    print("🧪 RADIAL NAVIER SOLVER TEST")
    print("=" * 70)

    tests = [value for name, value in globals().items() if name.startswith("test_") and callable(value)]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"   ✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"   ❌ {test.__name__}: {e}")

    print(f"\n📊 {len(tests) - failed}/{len(tests)} tests passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
