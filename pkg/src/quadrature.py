"""
Adaptive Quadrature Engine
Radial, annular and radial-angular integrals built on QUADPACK (scipy.integrate.quad)
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.constants import sphere_measure
from src.errors import DomainError


@dataclass(frozen=True)
class IntegralResult:
    """Value of an integral with its error estimate and work counter"""
    value: float
    error_estimate: float
    subdivisions_used: int
    abs_tol: float
    rel_tol: float

    @property
    def converged(self) -> bool:
        return self.error_estimate <= max(self.abs_tol, self.rel_tol * abs(self.value))

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            subdivisions_used=self.subdivisions_used + other.subdivisions_used,
            abs_tol=max(self.abs_tol, other.abs_tol),
            rel_tol=max(self.rel_tol, other.rel_tol),
        )

    def scaled(self, factor: float) -> "IntegralResult":
        return replace(self, value=self.value * factor,
                       error_estimate=self.error_estimate * abs(factor))


@dataclass(frozen=True)
class QuadratureEngine:
    """
    Immutable quadrature configuration

    Args:
        abs_tol: Absolute tolerance handed to QUADPACK
        rel_tol: Relative tolerance handed to QUADPACK
        max_subdivisions: Cap on adaptive bisections per call
        singularity_exponent: Declared power γ > -1 of an integrable singularity
            at the left endpoint of integrate_radial
    """
    abs_tol: float = 1e-14
    rel_tol: float = 1e-11
    max_subdivisions: int = 400
    singularity_exponent: Optional[float] = None

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 16:
            raise DomainError("max_subdivisions must be at least 16")
        if self.singularity_exponent is not None and self.singularity_exponent <= -1:
            raise DomainError("singularity exponent must exceed -1")

    def with_tolerances(self, abs_tol: Optional[float] = None,
                        rel_tol: Optional[float] = None) -> "QuadratureEngine":
        return replace(
            self,
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
        )

    def refined(self, factor: float = 10.0) -> "QuadratureEngine":
        """Engine with both tolerances tightened by factor"""
        return self.with_tolerances(self.abs_tol / factor, self.rel_tol / factor)

    # ------------------------------------------------------------------
    # Core QUADPACK call
    # ------------------------------------------------------------------

    def _quad(self, g: Callable[[float], float], a: float, b: float,
              points: Optional[Sequence[float]] = None) -> IntegralResult:
        inner = None
        if points:
            inner = sorted({float(x) for x in points if a < x < b})
        out = integrate.quad(
            g, a, b,
            epsabs=self.abs_tol,
            epsrel=self.rel_tol,
            limit=self.max_subdivisions,
            points=inner or None,
            full_output=1,
        )
        value, error, info = out[0], out[1], out[2]
        return IntegralResult(
            value=float(value),
            error_estimate=float(abs(error)),
            subdivisions_used=int(info.get("last", 0)),
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
        )

    # ------------------------------------------------------------------
    # Public rules
    # ------------------------------------------------------------------

    def integrate_radial(self, f: Callable[[float], float], a: float, b: float,
                         points: Optional[Sequence[float]] = None) -> IntegralResult:
        """
        ∫_a^b f(r) dr with b possibly infinite

        The infinite tail is mapped to [0, 1) by r = a + t/(1-t). A declared
        singularity_exponent γ at r=a is removed by r = a + (b-a)s^{1/(1+γ)}.
        """
        if b <= a:
            raise DomainError(f"empty interval [{a}, {b}]")

        gamma = self.singularity_exponent
        if gamma is not None and gamma != 0.0:
            if math.isinf(b):
                head = self._integrate_singular(f, a, a + 1.0, gamma)
                tail = self.integrate_radial_regular(f, a + 1.0, b, points)
                return head + tail
            return self._integrate_singular(f, a, b, gamma)

        return self.integrate_radial_regular(f, a, b, points)

    def integrate_radial_regular(self, f: Callable[[float], float], a: float, b: float,
                                 points: Optional[Sequence[float]] = None) -> IntegralResult:
        if not math.isinf(b):
            return self._quad(f, a, b, points)

        def mapped(t: float) -> float:
            one_minus = 1.0 - t
            return f(a + t / one_minus) / (one_minus * one_minus)

        mapped_points = None
        if points:
            mapped_points = [(x - a) / (1.0 + x - a) for x in points if x > a]
        return self._quad(mapped, 0.0, 1.0, mapped_points)

    def _integrate_singular(self, f: Callable[[float], float], a: float, b: float,
                            gamma: float) -> IntegralResult:
        power = 1.0 / (1.0 + gamma)
        width = b - a

        def mapped(s: float) -> float:
            if s <= 0.0:
                return 0.0
            return f(a + width * s ** power) * width * power * s ** (power - 1.0)

        return self._quad(mapped, 0.0, 1.0)

    def integrate_volume(self, f: Callable[[float], float], N: int, a: float = 0.0,
                         b: float = math.inf,
                         points: Optional[Sequence[float]] = None) -> IntegralResult:
        """Integral of a radial function over {a < |x| < b} in R^N"""
        result = self.integrate_radial_regular(lambda r: f(r) * r ** (N - 1), a, b, points)
        return result.scaled(sphere_measure(N))

    def integrate_annulus(self, f: Callable[[float], float], N: int, a: float, b: float,
                          scales: Sequence[float] = ()) -> IntegralResult:
        """
        Integral of a radial function over {a < |x| < b}, 0 < a < b < ∞

        Uses x = ln r so that integrands living on several widely separated
        scales get equal resolution per decade; scales become breakpoints.
        """
        if not (0.0 < a < b) or math.isinf(b):
            raise DomainError(f"annulus needs 0 < a < b < inf, got ({a}, {b})")

        def in_log(x: float) -> float:
            r = math.exp(x)
            return f(r) * r ** N

        log_points = [math.log(s) for s in scales if a < s < b]
        result = self._quad(in_log, math.log(a), math.log(b), log_points)
        return result.scaled(sphere_measure(N))

    def integrate_radial_angular(self, f: Callable[[float, float], float], N: int,
                                 a: float, b: float,
                                 points: Optional[Sequence[float]] = None) -> IntegralResult:
        """
        Integral over {a < |y| < b} of an axisymmetric function f(r, φ)

        φ is the angle to the symmetry axis; the weight is
        |S^{N-2}| r^{N-1} sin^{N-2}φ. Inner and outer errors are combined in
        quadrature.
        """
        if N < 2:
            raise DomainError("radial-angular reduction needs N >= 2")
        inner_rel: List[float] = [0.0]
        inner_work: List[int] = [0]

        def shell(r: float) -> float:
            value, error, info = integrate.quad(
                lambda phi: f(r, phi) * math.sin(phi) ** (N - 2),
                0.0, math.pi,
                epsabs=self.abs_tol,
                epsrel=self.rel_tol,
                limit=self.max_subdivisions,
                full_output=1,
            )[:3]
            inner_work[0] += int(info.get("last", 0))
            if value != 0.0:
                inner_rel[0] = max(inner_rel[0], abs(error / value))
            return value * r ** (N - 1)

        outer = self.integrate_radial_regular(shell, a, b, points)
        outer = outer.scaled(sphere_measure(N - 1))
        error = math.hypot(outer.error_estimate, abs(outer.value) * inner_rel[0])
        return IntegralResult(
            value=outer.value,
            error_estimate=error,
            subdivisions_used=outer.subdivisions_used + inner_work[0],
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
        )

    def integrate_panels(self, f: Callable[[np.ndarray], np.ndarray],
                         nodes: np.ndarray, order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
        """
        Gauss-Legendre integral of a vectorized f on every panel [nodes[j], nodes[j+1]]

        Returns per-panel values and an error estimate from the embedded
        half-order rule.
        """
        values = _gauss_panels(f, nodes, order)
        coarse = _gauss_panels(f, nodes, max(order // 2, 2))
        return values, np.abs(values - coarse)


def _gauss_panels(f: Callable[[np.ndarray], np.ndarray], nodes: np.ndarray,
                  order: int) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(order)
    left = nodes[:-1, None]
    half = 0.5 * (nodes[1:, None] - left)
    points = left + half * (x[None, :] + 1.0)
    return (f(points) * w[None, :]).sum(axis=1) * half[:, 0]


def gauss_partial(f: Callable[[np.ndarray], np.ndarray], left: np.ndarray,
                  right: np.ndarray, order: int = 16) -> np.ndarray:
    """Gauss-Legendre integral of f over [left_i, right_i] for arrays of endpoints"""
    x, w = np.polynomial.legendre.leggauss(order)
    left = np.asarray(left, dtype=float)[:, None]
    half = 0.5 * (np.asarray(right, dtype=float)[:, None] - left)
    points = left + half * (x[None, :] + 1.0)
    return (f(points) * w[None, :]).sum(axis=1) * half[:, 0]
