"""
Test script for the bubble closed forms
Entire equation, kernel derivatives and the nonlinearity

Usage: Run from project root directory
    python scripts/test_bubble.py
"""

import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from src.bubble import (BubbleParams, bubble_offset, bubble_radial, bubble_value, laplacian_offset,
                        laplacian_radial, nonlinearity, verify_entire_equation, z0_laplacian_radial,
                        z0_radial, z_kernel)
from src.constants import alpha_n, make_dims
from src.errors import DomainError, SingularDerivativeError

RADII = np.geomspace(0.05, 20.0, 25)


def test_peak_value_is_alpha():
    dims = make_dims(5, 1)
    assert bubble_radial(dims, 1.0, 0.0) == pytest.approx(alpha_n(5))
    # U_{μ,0}(0) = α μ^{-(N-4)/2}
    assert bubble_radial(dims, 0.25, 0.0) == pytest.approx(alpha_n(5) * 2.0)


def test_entire_equation_closed_form():
    for N in (5, 6, 7, 8, 11):
        assert verify_entire_equation(make_dims(N, 1)) < 1e-10


def test_entire_equation_finite_difference():
    # second-order differences on the default grid: the residual sits near 2e-6
    assert verify_entire_equation(make_dims(6, 1), method="finite_difference") < 1e-5
    with pytest.raises(DomainError):
        verify_entire_equation(make_dims(6, 1), method="spectral")


def test_z0_is_scale_derivative():
    dims = make_dims(7, 1)
    mu, h = 0.8, 1e-5
    fd = (bubble_radial(dims, mu + h, RADII) - bubble_radial(dims, mu - h, RADII)) / (2 * h)
    np.testing.assert_allclose(z0_radial(dims, mu, RADII), fd, rtol=1e-6, atol=1e-8)
    fd_lap = (laplacian_radial(dims, mu + h, RADII) - laplacian_radial(dims, mu - h, RADII)) / (2 * h)
    np.testing.assert_allclose(z0_laplacian_radial(dims, mu, RADII), fd_lap, rtol=1e-6, atol=1e-6)


def test_translation_kernels():
    dims = make_dims(5, 1)
    h = 1e-6
    x = np.array([0.3, -0.2, 0.1, 0.4, 0.05])
    for index in range(1, 6):
        shift = np.zeros(5)
        shift[index - 1] = h
        plus = bubble_value(dims, BubbleParams(0.7, tuple(shift)), x)
        minus = bubble_value(dims, BubbleParams(0.7, tuple(-shift)), x)
        expected = (plus - minus) / (2 * h)
        assert z_kernel(dims, BubbleParams(0.7), index, x) == pytest.approx(expected, rel=1e-6)
    with pytest.raises(DomainError):
        z_kernel(dims, BubbleParams(0.7), 6, x)


def test_offsets_match_direct_difference():
    dims = make_dims(6, 1)
    r0 = 0.4
    expected = bubble_radial(dims, 0.5, RADII) - bubble_radial(dims, 0.5, r0)
    np.testing.assert_allclose(bubble_offset(dims, 0.5, RADII, r0), expected, rtol=1e-10, atol=1e-12)
    expected_lap = laplacian_radial(dims, 0.5, RADII) - laplacian_radial(dims, 0.5, r0)
    np.testing.assert_allclose(laplacian_offset(dims, 0.5, RADII, r0), expected_lap, rtol=1e-10, atol=1e-10)


def test_offset_resolves_tiny_differences():
    dims = make_dims(5, 1)
    # U(r) - U(0) ≈ -m α μ^{-m-2} r² near the center
    r = 1e-9
    leading = -dims.m * alpha_n(5) * r * r
    assert bubble_offset(dims, 1.0, r, 0.0) == pytest.approx(leading, rel=1e-6)


def test_nonlinearity_is_odd_with_derivatives():
    dims = make_dims(5, 1)
    u = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    f = nonlinearity(dims, u)
    np.testing.assert_allclose(f, -f[::-1])
    np.testing.assert_allclose(nonlinearity(dims, u, 1), 9.0 * np.abs(u) ** 8)
    np.testing.assert_allclose(nonlinearity(dims, u, 2), 72.0 * np.abs(u) ** 6 * u)
    with pytest.raises(DomainError):
        nonlinearity(dims, u, 3)


def test_second_derivative_singular_in_high_dimension():
    dims = make_dims(13, 1)
    with pytest.raises(SingularDerivativeError):
        nonlinearity(dims, np.array([0.0, 1.0]), 2)
    assert np.all(np.isfinite(nonlinearity(dims, np.array([0.5, 1.0]), 2)))


def test_bubble_params_validation():
    with pytest.raises(DomainError):
        BubbleParams(0.0)
    with pytest.raises(DomainError):
        bubble_value(make_dims(5, 1), BubbleParams(1.0, (0.0, 0.0)), np.zeros(5))


def main():
    print("=" * 70)
    print("🧪 BUBBLE CLOSED FORMS TEST")
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
