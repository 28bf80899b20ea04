"""
Test script for the bubble tower
Scale ordering, annulus decomposition, sign structure, residual norms and the energy

Usage: Run from project root directory
    python scripts/test_tower.py
"""

import math
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from src.constants import make_dims, sphere_measure
from src.errors import DomainError, ScaleOrderingError
from src.quadrature import QuadratureEngine
from src.radial_solver import RadialGrid, sample_field
from src.tower import (BubbleTower, annulus_decomposition, assemble_tower, bilinear_form,
                       count_sign_changes, dirichlet_energy, f_prime_comparison, lq_integral, lq_norm,
                       outer_sup, residual_w1, residual_w2, single_bubble_split, tower_energy,
                       tower_scales)

QUAD = QuadratureEngine()


def _tower(k=2, eps=1e-6, mu=None):
    dims = make_dims(5, k)
    return BubbleTower(tower_scales(dims, eps, mu if mu is not None else [1.0] * k))


def test_scales_follow_the_exponent_ladder():
    cfg = tower_scales(make_dims(5, 2), 1e-6, [1.0, 2.0])
    # θ = 6/5 for N=5, k=2: exponents 0.3 and 0.9
    np.testing.assert_allclose(cfg.scales, [1e-6 ** 0.3, 2.0 * 1e-6 ** 0.9], rtol=1e-12)


def test_scale_ordering_errors():
    dims = make_dims(5, 2)
    with pytest.raises(DomainError):
        tower_scales(dims, 1e-6, [1.0])
    with pytest.raises(DomainError):
        tower_scales(dims, 0.6, [1.0, 1.0])
    with pytest.raises(ScaleOrderingError):
        tower_scales(dims, 1e-4, [1e-3, 1e3])


def test_annulus_decomposition_tiles_the_inner_ball():
    cfg = tower_scales(make_dims(5, 3), 1e-8, [1.0, 1.0, 1.0])
    decomposition = annulus_decomposition(cfg)
    assert decomposition.k == 3
    assert decomposition.tiles()
    assert decomposition.annulus(1)[1] == 0.5
    assert decomposition.annulus(3)[0] == 1e-8
    inner = decomposition.annulus(1)[0]
    assert inner == pytest.approx(math.sqrt(cfg.scales[0] * cfg.scales[1]))
    with pytest.raises(DomainError):
        decomposition.annulus(4)


def test_tower_has_k_minus_one_sign_changes():
    for k in (1, 2, 3):
        tower = _tower(k=k, eps=1e-8)
        grid = RadialGrid.log_graded(5, 1e-8, 1024, focus_scales=tower.scales)
        field = assemble_tower(tower, grid)
        assert field.resolved
        assert count_sign_changes(field) == k - 1
        assert field.values[0] == pytest.approx(0.0, abs=1e-10 * field.sup_norm())


def test_negated_tower_and_signs():
    tower = _tower()
    np.testing.assert_array_equal(tower.signs, [1.0, -1.0])
    r = np.array([1e-5, 1e-3, 0.2])
    np.testing.assert_allclose(tower.negated().value(r), -tower.value(r))
    with pytest.raises(DomainError):
        BubbleTower(tower.cfg, signs=[1.0])


def test_coarse_grid_is_flagged():
    tower = _tower(k=1, eps=1e-4)
    grid = RadialGrid(5, 1e-4, np.geomspace(1e-4, 1.0, 20))
    field = assemble_tower(tower, grid)
    assert not field.resolved
    with pytest.raises(DomainError):
        assemble_tower(tower, RadialGrid.log_graded(5, 1e-3, 256))


def test_outer_size_below_the_peak():
    tower = _tower(k=1, eps=1e-4)
    grid = RadialGrid.log_graded(5, 1e-4, 512, focus_scales=tower.scales)
    field = assemble_tower(tower, grid)
    assert 0.0 < outer_sup(field) < 1e-2 * field.sup_norm()


def test_lebesgue_integrals():
    eps = 1e-3
    grid = RadialGrid.log_graded(5, eps, 256)
    one = sample_field(grid, lambda r: np.ones_like(np.asarray(r, dtype=float)), "one")
    expected = sphere_measure(5) * (1.0 - eps ** 5) / 5.0
    assert lq_integral(one, 2.0, QUAD).value == pytest.approx(expected, rel=1e-10)
    assert lq_norm(one, 3.0, QUAD) == pytest.approx(expected ** (1.0 / 3.0), rel=1e-10)
    with pytest.raises(DomainError):
        lq_norm(one, 0.5, QUAD)


def test_w1_vanishes_for_one_bubble():
    w1 = residual_w1(_tower(k=1, eps=1e-4), QUAD)
    assert w1.value == 0.0
    assert w1.converged


def test_w1_cross_terms_for_two_bubbles():
    w1 = residual_w1(_tower(k=2, eps=1e-6), QUAD)
    assert w1.value > 0.0
    assert set(w1.breakdown) == {"A1", "A2", "outer", "cross_A1"}
    assert w1.breakdown["cross_A1"] > 0.0
    assert w1.exponent == pytest.approx(10.0 / 9.0)


def test_w2_breakdown():
    w2 = residual_w2(_tower(k=1, eps=1e-4), QUAD)
    assert w2.value > 0.0
    assert w2.breakdown["W21"] > 0.0
    assert w2.breakdown["W22"] >= 0.0
    assert {"A1", "outer"} <= set(w2.breakdown)


def test_f_prime_comparison_index_check():
    tower = _tower(k=2)
    assert f_prime_comparison(tower, 1, QUAD).value > 0.0
    with pytest.raises(DomainError):
        f_prime_comparison(tower, 2, QUAD)


def test_bilinear_form_is_symmetric():
    tower = _tower(k=2, eps=1e-6)
    b01 = bilinear_form(tower, 0, 1, QUAD).value
    b10 = bilinear_form(tower, 1, 0, QUAD).value
    assert b01 > 0.0
    assert b01 == pytest.approx(b10, rel=1e-7)


def test_dirichlet_energy_matches_bilinear_diagonal():
    tower = _tower(k=1, eps=1e-3)
    assert dirichlet_energy(tower, QUAD).value == pytest.approx(
        bilinear_form(tower, 0, 0, QUAD).value, rel=1e-8)


def test_energy_excess_matches_direct_energy():
    # balance scale (75/8)^(1/8); at eps=1e-2 the hole radius is a third of the bubble scale and the sign flips
    energy = tower_energy(_tower(k=1, eps=1e-6, mu=[(75.0 / 8.0) ** 0.125]), QUAD)
    assert energy.excess > 0.0
    assert energy.value - energy.bubble_energy == pytest.approx(energy.excess, rel=1e-6)
    assert energy.bubble_energy == pytest.approx(0.4 * 105.0 ** 1.25 * math.pi ** 3 / 32.0, rel=1e-12)


def test_single_bubble_split():
    split = single_bubble_split(_tower(k=1, eps=1e-4), QUAD)
    assert split["robin_piece"] == pytest.approx(split["robin_target"], rel=5e-2)
    assert split["hole_piece"] > 0.0
    assert split["excess"] == pytest.approx(
        split["robin_piece"] + split["hole_piece"] + split["truncation_piece"])
    with pytest.raises(DomainError):
        single_bubble_split(_tower(k=2), QUAD)


def main():
    print("=" * 70)
    print("🧪 BUBBLE TOWER TEST")
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
