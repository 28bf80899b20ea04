"""
Dimensional constants
Exponent bookkeeping, bubble normalization and the whole-space energy constants
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Dict

from scipy import special

from src.errors import DomainError, QuadratureError

if TYPE_CHECKING:
    from src.quadrature import QuadratureEngine


@dataclass(frozen=True)
class ProblemDims:
    """
    Arithmetic backbone of a run

    Exponents are exact rationals; use the *_value properties at evaluation sites.
    """
    N: int
    k: int
    p: Fraction
    theta: Fraction

    @property
    def p_value(self) -> float:
        return float(self.p)

    @property
    def theta_value(self) -> float:
        return float(self.theta)

    @property
    def m(self) -> float:
        """Bubble decay exponent (N-4)/2"""
        return (self.N - 4) / 2.0

    @property
    def beta(self) -> Fraction:
        """Dual Lebesgue exponent 2N/(N+4)"""
        return Fraction(2 * self.N, self.N + 4)

    @property
    def energy_rate(self) -> Fraction:
        """Leading energy exponent (N-4)θ/(2k)"""
        return Fraction(self.N - 4) * self.theta / (2 * self.k)

    def scale_exponent(self, i: int) -> Fraction:
        """Exponent of ε in μ_iε, i counted from 1"""
        return Fraction(2 * i - 1, 2 * self.k) * self.theta


@dataclass(frozen=True)
class EnergyConstants:
    """Normalization and whole-space integrals entering the reduced energy"""
    alpha_N: float
    c1: float
    c2: float
    c3: float
    sphere_measure: float
    c1_error: float = 0.0
    c2_error: float = 0.0

    def bubble_energy(self, dims: ProblemDims) -> float:
        """Energy (2/N)α^{p+1}c1 of one bubble in the whole space"""
        return 2.0 / dims.N * self.alpha_N ** (dims.p_value + 1.0) * self.c1


def make_dims(N: int, k: int) -> ProblemDims:
    """
    Build the exponent bookkeeping for dimension N and tower depth k

    Args:
        N: Space dimension, at least 5
        k: Number of bubbles in the tower, at least 1

    Returns:
        ProblemDims with p=(N+4)/(N-4) and θ=2k(N-2)/(2k(N-2)-2)
    """
    if not isinstance(N, int) or N < 5:
        raise DomainError(f"dimension N must be an integer >= 5, got {N!r}")
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"tower depth k must be an integer >= 1, got {k!r}")

    p = Fraction(N + 4, N - 4)
    theta = Fraction(2 * k * (N - 2), 2 * k * (N - 2) - 2)
    return ProblemDims(N=N, k=k, p=p, theta=theta)


def alpha_n(N: int) -> float:
    """Bubble normalization (N(N-4)(N-2)(N+2))^{(N-4)/8}"""
    return float(N * (N - 4) * (N - 2) * (N + 2)) ** ((N - 4) / 8.0)


def sphere_measure(N: int) -> float:
    """Surface measure 2π^{N/2}/Γ(N/2) of the unit sphere in R^N"""
    if N < 1:
        raise DomainError(f"sphere dimension must be >= 1, got {N}")
    return 2.0 * math.pi ** (N / 2.0) / special.gamma(N / 2.0)


def beta_whole_space(N: int, q: float) -> float:
    """
    Closed form of ∫_{R^N} (1+|z|^2)^{-q} dz = π^{N/2}Γ(q-N/2)/Γ(q)

    Used as the oracle for the quadrature-computed constants.
    """
    if q <= N / 2.0:
        raise DomainError(f"integral diverges for q={q} <= N/2")
    return math.pi ** (N / 2.0) * special.gamma(q - N / 2.0) / special.gamma(q)


def closed_form_constants(dims: ProblemDims) -> Dict[str, float]:
    """Beta-integral values of c1, c2 (= Γ(0)), c3 and |S^{N-1}|"""
    N = dims.N
    alpha = alpha_n(N)
    s = sphere_measure(N)
    return {
        "alpha_N": alpha,
        "c1": beta_whole_space(N, float(N)),
        "c2": beta_whole_space(N, (N + 4) / 2.0),
        "c3": -3.0 * (N - 2) * s / (2.0 * alpha ** (dims.p_value + 1.0)),
        "sphere_measure": s,
    }


def energy_constants(dims: ProblemDims, quad: "QuadratureEngine") -> EnergyConstants:
    """
    Evaluate c1 and c2 by radial quadrature of their whole-space integrals

    Args:
        dims: Problem dimensions
        quad: Quadrature engine (its tolerances bound the reported errors)

    Returns:
        EnergyConstants with error estimates from the engine
    """
    N = dims.N
    alpha = alpha_n(N)
    s = sphere_measure(N)

    c1 = quad.integrate_volume(lambda r: (1.0 + r * r) ** (-N), N)
    c2 = quad.integrate_volume(lambda r: (1.0 + r * r) ** (-(N + 4) / 2.0), N)

    for name, result in (("c1", c1), ("c2", c2)):
        if not result.converged:
            raise QuadratureError(
                f"{name} did not converge for N={N}",
                value=result.value,
                error_estimate=result.error_estimate,
            )

    c3 = -3.0 * (N - 2) * s / (2.0 * alpha ** (dims.p_value + 1.0))
    return EnergyConstants(
        alpha_N=alpha,
        c1=c1.value,
        c2=c2.value,
        c3=c3,
        sphere_measure=s,
        c1_error=c1.error_estimate,
        c2_error=c2.error_estimate,
    )
