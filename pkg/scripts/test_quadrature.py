"""
Test script for the adaptive quadrature engine
Radial, annular, singular and radial-angular rules against closed-form integrals

Usage: Run from project root directory
    python scripts/test_quadrature.py
"""

import math
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from src.errors import DomainError
from src.quadrature import IntegralResult, QuadratureEngine, gauss_partial


def test_infinite_tail_is_mapped():
    result = QuadratureEngine().integrate_radial(lambda r: math.exp(-r), 0.0, math.inf)
    assert result.value == pytest.approx(1.0, rel=1e-11)
    assert result.converged


def test_polynomial_tail():
    # ∫_1^∞ r^{-3} dr = 1/2
    result = QuadratureEngine().integrate_radial(lambda r: r ** -3, 1.0, math.inf)
    assert result.value == pytest.approx(0.5, rel=1e-10)


def test_gaussian_volume_integral():
    quad = QuadratureEngine()
    for N in (3, 5, 8):
        result = quad.integrate_volume(lambda r: math.exp(-r * r), N)
        assert result.value == pytest.approx(math.pi ** (N / 2.0), rel=1e-10)


def test_annulus_in_log_variable():
    result = QuadratureEngine().integrate_annulus(lambda r: 1.0, 3, 1.0, 2.0)
    assert result.value == pytest.approx(4.0 * math.pi / 3.0 * 7.0, rel=1e-11)


def test_annulus_with_scale_breakpoints():
    # rescaled bubble profile at r = 1e-4, total mass π³/32
    scale = 1e-4
    f = lambda r: scale ** -5 * (1.0 + (r / scale) ** 2) ** -5
    result = QuadratureEngine().integrate_annulus(f, 5, 1e-8, 1.0, scales=(scale,))
    assert result.value == pytest.approx(math.pi ** 3 / 32.0, rel=1e-9)


def test_declared_singularity():
    quad = QuadratureEngine(singularity_exponent=-0.5)
    result = quad.integrate_radial(lambda r: r ** -0.5, 0.0, 1.0)
    assert result.value == pytest.approx(2.0, rel=1e-10)


def test_radial_angular_unit_ball_volume():
    result = QuadratureEngine().integrate_radial_angular(lambda r, phi: 1.0, 3, 0.0, 1.0)
    assert result.value == pytest.approx(4.0 * math.pi / 3.0, rel=1e-10)


def test_radial_angular_axis_moment():
    # ∫_{|y|<1} y_N² dy = |B|/(N+2) in R^3
    result = QuadratureEngine().integrate_radial_angular(
        lambda r, phi: (r * math.cos(phi)) ** 2, 3, 0.0, 1.0)
    assert result.value == pytest.approx(4.0 * math.pi / 15.0, rel=1e-10)


def test_panels_and_partial_rules():
    nodes = np.linspace(0.0, 1.0, 5)
    values, errors = QuadratureEngine().integrate_panels(lambda x: x ** 2, nodes)
    assert values.sum() == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert np.all(errors < 1e-14)
    partial = gauss_partial(np.exp, np.zeros(3), np.array([0.5, 1.0, 2.0]))
    assert partial == pytest.approx(np.expm1([0.5, 1.0, 2.0]), rel=1e-14)


def test_results_add_and_scale():
    a = IntegralResult(1.0, 1e-12, 3, 1e-14, 1e-11)
    b = IntegralResult(2.0, 2e-12, 4, 1e-14, 1e-11)
    total = (a + b).scaled(-2.0)
    assert total.value == -6.0
    assert total.error_estimate == pytest.approx(6e-12)
    assert total.subdivisions_used == 7


def test_invalid_settings_rejected():
    with pytest.raises(DomainError):
        QuadratureEngine(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureEngine(max_subdivisions=4)
    with pytest.raises(DomainError):
        QuadratureEngine().integrate_radial(lambda r: r, 1.0, 1.0)
    with pytest.raises(DomainError):
        QuadratureEngine().integrate_annulus(lambda r: r, 5, 0.0, 1.0)


def test_refined_tightens_both_tolerances():
    quad = QuadratureEngine().refined(10.0)
    assert quad.abs_tol == pytest.approx(1e-15)
    assert quad.rel_tol == pytest.approx(1e-12)


def main():
    print("=" * 70)
    print("🧪 QUADRATURE ENGINE TEST")
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
