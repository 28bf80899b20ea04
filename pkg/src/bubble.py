"""
Bubble closed forms
Standard bubble U_{μ,ξ}, its Laplacian, the kernels Z^0..Z^N and the nonlinearity f
"""

from dataclasses import dataclass, field
from typing import Dict, Sequence, Union

import numpy as np

from src.constants import ProblemDims, alpha_n
from src.errors import DomainError, SingularDerivativeError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class BubbleParams:
    """Scale and center of one bubble"""
    mu: float
    xi: tuple = field(default=())

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"bubble scale must be positive, got {self.mu}")

    def center(self, N: int) -> np.ndarray:
        if len(self.xi) == 0:
            return np.zeros(N)
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape != (N,):
            raise DomainError(f"center must have {N} coordinates, got {xi.shape}")
        return xi


def _offset(dims: ProblemDims, b: BubbleParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dims.N:
        raise DomainError(f"points must have {dims.N} coordinates, got {x.shape}")
    return x - b.center(dims.N)


# ----------------------------------------------------------------------
# Radial profiles (functions of r = |x - ξ|)
# ----------------------------------------------------------------------

def bubble_radial(dims: ProblemDims, mu: float, r: ArrayLike) -> ArrayLike:
    """U_{μ,0}(r) = α_N (μ/(μ²+r²))^{(N-4)/2}"""
    m = dims.m
    return alpha_n(dims.N) * (mu / (mu * mu + np.square(r))) ** m


def laplacian_radial(dims: ProblemDims, mu: float, r: ArrayLike) -> ArrayLike:
    """ΔU_{μ,0}(r) = -(N-4)α_N μ^m (Nμ²+2r²)/(μ²+r²)^{m+2}"""
    N, m = dims.N, dims.m
    r2 = np.square(r)
    s = mu * mu + r2
    return -(N - 4) * alpha_n(N) * mu ** m * (N * mu * mu + 2.0 * r2) / s ** (m + 2.0)


def z0_radial(dims: ProblemDims, mu: float, r: ArrayLike) -> ArrayLike:
    """Z^0 = ∂U/∂μ = α_N m μ^{m-1}(r²-μ²)/(μ²+r²)^{m+1}"""
    m = dims.m
    r2 = np.square(r)
    return alpha_n(dims.N) * m * mu ** (m - 1.0) * (r2 - mu * mu) / (mu * mu + r2) ** (m + 1.0)


def z0_laplacian_radial(dims: ProblemDims, mu: float, r: ArrayLike) -> ArrayLike:
    """ΔZ^0 = ∂(ΔU)/∂μ"""
    N, m = dims.N, dims.m
    r2 = np.square(r)
    s = mu * mu + r2
    shape = N * mu * mu + 2.0 * r2
    d_kernel = (
        m * mu ** (m - 1.0) * shape / s ** (m + 2.0)
        + mu ** m * 2.0 * N * mu / s ** (m + 2.0)
        - mu ** m * shape * (m + 2.0) * 2.0 * mu / s ** (m + 3.0)
    )
    return -(N - 4) * alpha_n(N) * d_kernel


def source_radial(dims: ProblemDims, mu: float, r: ArrayLike) -> ArrayLike:
    """U^p, the right-hand side of Δ²U = U^p"""
    return bubble_radial(dims, mu, r) ** dims.p_value


def z0_source_radial(dims: ProblemDims, mu: float, r: ArrayLike) -> ArrayLike:
    """p U^{p-1} Z^0, the right-hand side of Δ²Z^0"""
    p = dims.p_value
    return p * bubble_radial(dims, mu, r) ** (p - 1.0) * z0_radial(dims, mu, r)


def bubble_offset(dims: ProblemDims, mu: float, r: ArrayLike, r0: ArrayLike) -> ArrayLike:
    """U(r) - U(r0) without cancellation"""
    m = dims.m
    s0 = mu * mu + np.square(r0)
    ratio_m1 = (np.square(r) - np.square(r0)) / s0
    return alpha_n(dims.N) * (mu / s0) ** m * np.expm1(-m * np.log1p(ratio_m1))


def laplacian_offset(dims: ProblemDims, mu: float, r: ArrayLike, r0: ArrayLike) -> ArrayLike:
    """ΔU(r) - ΔU(r0) without cancellation"""
    N, m = dims.N, dims.m
    r2, r02 = np.square(r), np.square(r0)
    s0 = mu * mu + r02
    ratio_m1 = (r2 - r02) / s0
    decay = np.expm1(-(m + 2.0) * np.log1p(ratio_m1))
    shape0 = N * mu * mu + 2.0 * r02
    bracket = shape0 * decay + 2.0 * (r2 - r02) * (1.0 + decay)
    return -(N - 4) * alpha_n(N) * mu ** m * bracket / s0 ** (m + 2.0)


# ----------------------------------------------------------------------
# Point evaluations in R^N
# ----------------------------------------------------------------------

def bubble_value(dims: ProblemDims, b: BubbleParams, x) -> ArrayLike:
    """U_{μ,ξ}(x) for one point (shape (N,)) or a stack of points (shape (..., N))"""
    r = np.linalg.norm(_offset(dims, b, x), axis=-1)
    return bubble_radial(dims, b.mu, r)


def bubble_laplacian(dims: ProblemDims, b: BubbleParams, x) -> ArrayLike:
    """ΔU_{μ,ξ}(x)"""
    r = np.linalg.norm(_offset(dims, b, x), axis=-1)
    return laplacian_radial(dims, b.mu, r)


def z_kernel(dims: ProblemDims, b: BubbleParams, index: int, x) -> ArrayLike:
    """
    Derivative kernels of the bubble family

    Args:
        index: 0 for ∂U/∂μ, i in 1..N for ∂U/∂ξ_i
    """
    if not 0 <= index <= dims.N:
        raise DomainError(f"kernel index must be in 0..{dims.N}, got {index}")
    y = _offset(dims, b, x)
    r = np.linalg.norm(y, axis=-1)
    if index == 0:
        return z0_radial(dims, b.mu, r)
    m = dims.m
    mu = b.mu
    return (alpha_n(dims.N) * (dims.N - 4) * mu ** m * y[..., index - 1]
            / (mu * mu + np.square(r)) ** (m + 1.0))


def nonlinearity(dims: ProblemDims, u: ArrayLike, order: int = 0) -> ArrayLike:
    """
    f(u) = |u|^{p-1}u and its first two derivatives

    Args:
        order: 0 for f, 1 for f' = p|u|^{p-1}, 2 for f'' = p(p-1)|u|^{p-3}u
    """
    p = dims.p_value
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    if order == 0:
        return au ** (p - 1.0) * u
    if order == 1:
        return p * au ** (p - 1.0)
    if order == 2:
        if p < 2.0 and np.any(u == 0.0):
            raise SingularDerivativeError(
                f"f'' is unbounded at u=0 for N={dims.N} (p={p:.4f} < 2)"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            out = p * (p - 1.0) * au ** (p - 3.0) * u
        return np.where(u == 0.0, 0.0, out)
    raise DomainError(f"nonlinearity order must be 0, 1 or 2, got {order}")


# ----------------------------------------------------------------------
# Entire-equation check
# ----------------------------------------------------------------------

def _laplacian_powers(coeffs: Dict[float, float], N: int, mu: float) -> Dict[float, float]:
    """
    Apply Δ to Σ c_q (μ²+r²)^{-q}

    Δ s^{-q} = 2q(2q+2-N) s^{-q-1} - 4q(q+1)μ² s^{-q-2}
    """
    out: Dict[float, float] = {}
    for q, c in coeffs.items():
        out[q + 1.0] = out.get(q + 1.0, 0.0) + c * 2.0 * q * (2.0 * q + 2.0 - N)
        out[q + 2.0] = out.get(q + 2.0, 0.0) - c * 4.0 * q * (q + 1.0) * mu * mu
    return out


def _fd_laplacian(g, r: np.ndarray, h: float, N: int) -> np.ndarray:
    second = (-g(r + 2 * h) + 16 * g(r + h) - 30 * g(r) + 16 * g(r - h) - g(r - 2 * h)) / (12 * h * h)
    first = (-g(r + 2 * h) + 8 * g(r + h) - 8 * g(r - h) + g(r - 2 * h)) / (12 * h)
    return second + (N - 1) * first / r


def verify_entire_equation(dims: ProblemDims, radii: Union[Sequence[float], object, None] = None,
                           method: str = "closed_form", h: float = 1e-3) -> float:
    """
    Max relative residual of Δ²U_{1,0} = U_{1,0}^p at the sampled radii

    Args:
        radii: Sample radii, or any object with a `nodes` attribute (a grid)
        method: "closed_form" applies the exact Laplacian twice on powers of
            (1+r²); "finite_difference" applies a 4th-order radial stencil to
            the closed-form ΔU
    """
    if radii is None:
        radii = np.geomspace(0.1, 10.0, 10)
    r = np.asarray(getattr(radii, "nodes", radii), dtype=float)
    N = dims.N
    mu = 1.0
    target = source_radial(dims, mu, r)

    if method == "closed_form":
        coeffs = {dims.m: alpha_n(N) * mu ** dims.m}
        bilaplacian = _laplacian_powers(_laplacian_powers(coeffs, N, mu), N, mu)
        s = mu * mu + r * r
        value = sum(c * s ** (-q) for q, c in bilaplacian.items())
    elif method == "finite_difference":
        value = _fd_laplacian(lambda t: laplacian_radial(dims, mu, t), r, h, N)
    else:
        raise DomainError(f"unknown method {method!r}")

    return float(np.max(np.abs(value - target) / np.abs(target)))
