"""
Reduced Energy
Φ(μ, σ), the interaction kernel Γ, critical-point search and the
non-degeneracy certificates of the critical point
"""

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.bubble import BubbleParams, bubble_laplacian, bubble_value
from src.constants import EnergyConstants, ProblemDims, alpha_n, energy_constants, sphere_measure
from src.errors import (
    BoxCollisionError,
    DomainError,
    NewtonDivergenceError,
    QuadratureError,
    SingularStepError,
)
from src.quadrature import IntegralResult, QuadratureEngine
from src.radial_solver import robin_function

DEFAULT_BOX = 0.05
GRAD_TOL = 1e-10
CHAIN_TOL = 1e-8
BLOCK_TOL = 1e-7
SIGMA_STEP = 1e-2
GAMMA_STEP = 2e-2
G_BLOCK_STEP = 5e-2
G_ORACLE_TOL = 1e-3
GAMMA_REL_TOL = 1e-6
GAMMA_ABS_TOL = 1e-6


# ----------------------------------------------------------------------
# Interaction kernel
# ----------------------------------------------------------------------

class GammaKernel:
    """
    Γ(x) = ∫ (1+|y-x|²)^{-(N+4)/2} |y|^{4-N} dy as a function of |x|

    Direct values are memoized by radius. The engine tolerance is requested
    from the integrator; a value is accepted when its error estimate is within
    max(abs_tol, rel_tol·|Γ|) and QuadratureError is raised otherwise.
    """

    def __init__(self, dims: ProblemDims, quad: QuadratureEngine,
                 rel_tol: float = GAMMA_REL_TOL, abs_tol: float = GAMMA_ABS_TOL):
        self.dims = dims
        self.quad = quad
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self._memo: Dict[float, IntegralResult] = {}

    def evaluate(self, a: float) -> IntegralResult:
        """
        Quadrature value of Γ at |x| = a (1D path at a = 0, radial-angular otherwise)

        Raises:
            DomainError: a < 0
            QuadratureError: the error estimate exceeds the kernel tolerance
        """
        a = float(a)
        if a < 0.0:
            raise DomainError(f"|x| must be nonnegative, got {a}")
        if a in self._memo:
            return self._memo[a]

        N = self.dims.N
        q = (N + 4) / 2.0
        if a == 0.0:
            result = self.quad.integrate_volume(lambda r: r ** (4 - N) * (1.0 + r * r) ** (-q), N)
        else:
            def integrand(r: float, phi: float) -> float:
                return (1.0 + r * r + a * a - 2.0 * a * r * math.cos(phi)) ** (-q) * r ** (4 - N)

            result = self.quad.integrate_radial_angular(integrand, N, 0.0, math.inf, points=[a])

        if result.error_estimate > max(self.abs_tol, self.rel_tol * abs(result.value)):
            raise QuadratureError(
                f"Γ({a:.4g}) error estimate {result.error_estimate:.2e} above kernel tolerance "
                f"(rel {self.rel_tol:.0e}, abs {self.abs_tol:.0e})", result.value, result.error_estimate)
        self._memo[a] = result
        return result

    def __call__(self, a: float) -> float:
        return self.evaluate(a).value

    @property
    def converged(self) -> bool:
        """Every value so far met the engine tolerance, not only the kernel one"""
        return all(result.converged for result in self._memo.values())

    @property
    def max_error_estimate(self) -> float:
        return max((result.error_estimate for result in self._memo.values()), default=0.0)

    def of_point(self, sigma: np.ndarray) -> float:
        return self(float(np.linalg.norm(sigma)))


def gamma_kernel(x_norm: float, dims: ProblemDims, quad: QuadratureEngine) -> float:
    """Γ at |x| = x_norm"""
    return GammaKernel(dims, quad).evaluate(x_norm).value


def gamma_curvature(dims: ProblemDims, quad: QuadratureEngine) -> IntegralResult:
    """
    Γ''(0) = (1/N)∫|y|^{4-N} Δ(1+|y|²)^{-(N+4)/2} dy as a radial integral

    Oracle for the finite-difference Hessian of Γ at the origin.
    """
    N = dims.N
    q = (N + 4) / 2.0

    def radial(r: float) -> float:
        s = 1.0 + r * r
        laplacian = (-2.0 * q * N * s + 4.0 * q * (q + 1.0) * r * r) * s ** (-q - 2.0)
        return r ** (4 - N) * laplacian

    return quad.integrate_volume(radial, N).scaled(1.0 / N)


# ----------------------------------------------------------------------
# Points
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReducedPoint:
    """(μ, σ) with μ ∈ R₊^k, σ ∈ (R^N)^k and box parameter d"""
    mu: np.ndarray
    sigma: np.ndarray
    d: float = DEFAULT_BOX

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).ravel()
        sigma = np.array(self.sigma, dtype=float)
        if len(mu) < 1 or not np.all(mu > 0):
            raise DomainError("scales must be positive")
        if sigma.ndim != 2 or sigma.shape[0] != len(mu):
            raise DomainError(f"sigma must have shape (k, N), got {sigma.shape}")
        if not 0.0 < self.d < 1.0:
            raise DomainError(f"box parameter must lie in (0, 1), got {self.d}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def at_origin(cls, mu, N: int, d: float = DEFAULT_BOX) -> "ReducedPoint":
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        return cls(mu=mu, sigma=np.zeros((len(mu), N)), d=d)

    @property
    def k(self) -> int:
        return len(self.mu)

    def feasible(self) -> Tuple[bool, Optional[str]]:
        d = self.d
        for i, m in enumerate(self.mu):
            if not d < m < 1.0 / d:
                return False, f"mu_{i + 1} = {m:.6g} outside ({d}, {1.0 / d})"
        norms = np.linalg.norm(self.sigma, axis=1)
        for i, s in enumerate(norms):
            if not s < 1.0 / d:
                return False, f"|sigma_{i + 1}| = {s:.6g} not below {1.0 / d}"
        return True, None

    def to_nu(self, dims: ProblemDims) -> "NuPoint":
        return NuPoint.from_mu(self.mu, dims)


@dataclass(frozen=True, eq=False)
class NuPoint:
    """ν_i = μ_i^{(N-4)/2}"""
    nu: np.ndarray

    def __post_init__(self):
        nu = np.array(self.nu, dtype=float).ravel()
        if not np.all(nu > 0):
            raise DomainError("nu must be strictly positive")
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_mu(cls, mu, dims: ProblemDims) -> "NuPoint":
        return cls(np.asarray(mu, dtype=float) ** dims.m)

    def to_mu(self, dims: ProblemDims) -> np.ndarray:
        return self.nu ** (1.0 / dims.m)


# ----------------------------------------------------------------------
# Finite differences
# ----------------------------------------------------------------------

def _check_step(h: float):
    if not h > 1e-8:
        raise DomainError(f"finite-difference step {h:.1e} underflows")


def fd_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central gradient"""
    _check_step(h)
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * h)
    return grad


def _hessian_second_order(f: Callable[[np.ndarray], float], x: np.ndarray, h: float,
                          center: float) -> np.ndarray:
    n = len(x)
    hess = np.zeros((n, n))
    for i in range(n):
        e_i = np.zeros(n)
        e_i[i] = h
        hess[i, i] = (f(x + e_i) - 2.0 * center + f(x - e_i)) / (h * h)
        for j in range(i + 1, n):
            e_j = np.zeros(n)
            e_j[j] = h
            value = (f(x + e_i + e_j) - f(x + e_i - e_j)
                     - f(x - e_i + e_j) + f(x - e_i - e_j)) / (4.0 * h * h)
            hess[i, j] = hess[j, i] = value
    return hess


def fd_hessian(f: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    """Central Hessian with one Richardson step (fourth order, symmetric)"""
    _check_step(h)
    x = np.asarray(x, dtype=float)
    center = f(x)
    fine = _hessian_second_order(f, x, h, center)
    coarse = _hessian_second_order(f, x, 2.0 * h, center)
    return (4.0 * fine - coarse) / 3.0


# ----------------------------------------------------------------------
# The reduced functional
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BalanceChain:
    """Closed-form critical point at σ = 0"""
    lam: float
    nu: np.ndarray
    mu: np.ndarray


class ReducedEnergy:
    """
    Φ(μ,σ) = H₁ν₁² + F(σ_k)ν_k^{-q} + Σ_l g(σ_l)ν_{l+1}/ν_l

    with ν = μ^{(N-4)/2}, q = 2(N-2)/(N-4), H₁ = c₂H(0,0),
    F(σ) = c₃ΔU₁,₀(σ)U₁,₀(σ) and g = 2Γ.
    """

    def __init__(self, dims: ProblemDims, constants: EnergyConstants, robin: float,
                 gamma: GammaKernel, sigma_step: float = SIGMA_STEP,
                 gamma_step: float = GAMMA_STEP):
        self.dims = dims
        self.constants = constants
        self.robin = robin
        self.gamma = gamma
        self.sigma_step = sigma_step
        self.gamma_step = gamma_step
        self.H1 = constants.c2 * robin
        self.q = 2.0 * (dims.N - 2) / (dims.N - 4)
        self._unit = BubbleParams(mu=1.0)

    @classmethod
    def build(cls, dims: ProblemDims, quad: QuadratureEngine, radius: float = 1.0) -> "ReducedEnergy":
        """Assemble constants, Robin function and kernel for a ball of the given radius"""
        return cls(dims, energy_constants(dims, quad), robin_function(dims.N, radius),
                   GammaKernel(dims, quad))

    # -- ingredients ---------------------------------------------------

    def f_sigma(self, sigma: np.ndarray) -> float:
        """F(σ) = c₃ΔU₁,₀(σ)U₁,₀(σ)"""
        sigma = np.asarray(sigma, dtype=float)
        return float(self.constants.c3 * bubble_laplacian(self.dims, self._unit, sigma)
                     * bubble_value(self.dims, self._unit, sigma))

    def g_sigma(self, sigma: np.ndarray) -> float:
        """g(σ) = 2Γ(σ)"""
        return 2.0 * self.gamma.of_point(sigma)

    def _ingredients(self, sigma: np.ndarray) -> Tuple[np.ndarray, float]:
        k = sigma.shape[0]
        gs = np.array([self.g_sigma(sigma[l]) for l in range(k - 1)])
        return gs, self.f_sigma(sigma[-1])

    # -- ν-block closed forms -----------------------------------------

    def value_nu(self, nu: np.ndarray, gs: np.ndarray, F: float) -> float:
        value = self.H1 * nu[0] ** 2 + F * nu[-1] ** (-self.q)
        if len(nu) > 1:
            value += float(np.sum(gs * nu[1:] / nu[:-1]))
        return float(value)

    def gradient_nu(self, nu: np.ndarray, gs: np.ndarray, F: float) -> np.ndarray:
        k = len(nu)
        grad = np.zeros(k)
        grad[0] += 2.0 * self.H1 * nu[0]
        grad[-1] -= self.q * F * nu[-1] ** (-self.q - 1.0)
        for l in range(k - 1):
            grad[l] -= gs[l] * nu[l + 1] / nu[l] ** 2
            grad[l + 1] += gs[l] / nu[l]
        return grad

    def hessian_nu(self, nu: np.ndarray, gs: np.ndarray, F: float) -> np.ndarray:
        k = len(nu)
        q = self.q
        hess = np.zeros((k, k))
        hess[0, 0] += 2.0 * self.H1
        hess[-1, -1] += q * (q + 1.0) * F * nu[-1] ** (-q - 2.0)
        for l in range(k - 1):
            hess[l, l] += 2.0 * gs[l] * nu[l + 1] / nu[l] ** 3
            hess[l, l + 1] = hess[l + 1, l] = -gs[l] / nu[l] ** 2
        return hess

    # -- public operations ---------------------------------------------

    def _nu_sigma(self, pt: ReducedPoint) -> Tuple[np.ndarray, np.ndarray]:
        if pt.sigma.shape[1] != self.dims.N:
            raise DomainError(f"sigma has {pt.sigma.shape[1]} coordinates, N={self.dims.N}")
        return pt.mu ** self.dims.m, pt.sigma

    def phi_value(self, pt: ReducedPoint) -> float:
        nu, sigma = self._nu_sigma(pt)
        gs, F = self._ingredients(sigma)
        return self.value_nu(nu, gs, F)

    def _sigma_gradients(self, sigma: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
        k = sigma.shape[0]
        grad_g = [fd_gradient(self.g_sigma, sigma[l], self.gamma_step) for l in range(k - 1)]
        grad_f = fd_gradient(self.f_sigma, sigma[-1], self.sigma_step)
        return grad_g, grad_f

    def phi_gradient(self, pt: ReducedPoint) -> np.ndarray:
        """Gradient in (ν, σ₁..σ_k) order"""
        nu, sigma = self._nu_sigma(pt)
        k, N = sigma.shape
        gs, F = self._ingredients(sigma)
        grad_g, grad_f = self._sigma_gradients(sigma)

        grad_sigma = np.zeros((k, N))
        for l in range(k - 1):
            grad_sigma[l] += grad_g[l] * nu[l + 1] / nu[l]
        grad_sigma[-1] += grad_f * nu[-1] ** (-self.q)
        return np.concatenate([self.gradient_nu(nu, gs, F), grad_sigma.ravel()])

    def phi_hessian(self, pt: ReducedPoint) -> np.ndarray:
        """
        Hessian in (ν, σ) order

        ν-block in closed form, σ-blocks from finite-difference Hessians of g
        and F, mixed entries from their finite-difference gradients.
        """
        nu, sigma = self._nu_sigma(pt)
        k, N = sigma.shape
        q = self.q
        gs, F = self._ingredients(sigma)
        grad_g, grad_f = self._sigma_gradients(sigma)

        size = k + N * k
        hess = np.zeros((size, size))
        hess[:k, :k] = self.hessian_nu(nu, gs, F)

        def block(l: int) -> slice:
            return slice(k + N * l, k + N * (l + 1))

        for l in range(k - 1):
            hess_g = fd_hessian(self.g_sigma, sigma[l], self.gamma_step)
            hess[block(l), block(l)] += hess_g * nu[l + 1] / nu[l]
            # mixed ∂ν∂σ_l of g(σ_l)ν_{l+1}/ν_l
            hess[l, block(l)] += -grad_g[l] * nu[l + 1] / nu[l] ** 2
            hess[l + 1, block(l)] += grad_g[l] / nu[l]

        hess_f = fd_hessian(self.f_sigma, sigma[-1], self.sigma_step)
        hess[block(k - 1), block(k - 1)] += hess_f * nu[-1] ** (-q)
        hess[k - 1, block(k - 1)] += -q * grad_f * nu[-1] ** (-q - 1.0)

        lower = np.tril_indices(size, -1)
        hess[lower] = hess.T[lower]
        return hess

    def balance_chain(self, k: int) -> BalanceChain:
        return balance_chain_solution(self.dims, k, self.H1, self.f_sigma(np.zeros(self.dims.N)),
                                      self.g_sigma(np.zeros(self.dims.N)))


def balance_chain_solution(dims: ProblemDims, k: int, H1: float, F: float, g: float) -> BalanceChain:
    """
    Solve 2H₁ν₁² = gν₂/ν₁ = ... = qFν_k^{-q} = λ in closed form

    λ^{q/2 + q(k-1) + 1} = qF(2H₁)^{q/2}g^{q(k-1)}, ν₁ = (λ/2H₁)^{1/2},
    ν_{i+1} = ν_iλ/g.
    """
    if k < 1 or H1 <= 0 or F <= 0 or (k > 1 and g <= 0):
        raise DomainError("balance chain needs k >= 1 and positive H1, F, g")
    q = 2.0 * (dims.N - 2) / (dims.N - 4)
    exponent = q / 2.0 + q * (k - 1) + 1.0
    log_lam = (math.log(q * F) + (q / 2.0) * math.log(2.0 * H1)
               + (q * (k - 1) * math.log(g) if k > 1 else 0.0)) / exponent
    lam = math.exp(log_lam)
    nu = np.empty(k)
    nu[0] = math.sqrt(lam / (2.0 * H1))
    for i in range(1, k):
        nu[i] = nu[i - 1] * lam / g
    return BalanceChain(lam=lam, nu=nu, mu=nu ** (1.0 / dims.m))


# ----------------------------------------------------------------------
# Limit matrix Q
# ----------------------------------------------------------------------

def q_matrix(N: int, k: int, lam: float, g0: float) -> np.ndarray:
    """
    Tridiagonal Q: diagonal 3λ, 2λ, ..., (3N-8)λ/(N-4) ((q+2)λ when k = 1),
    superdiagonal -g(0), subdiagonal -λ²/g(0)
    """
    if N < 5 or k < 1:
        raise DomainError(f"Q needs N >= 5 and k >= 1, got N={N}, k={k}")
    q = 2.0 * (N - 2) / (N - 4)
    if k == 1:
        return np.array([[(q + 2.0) * lam]])
    diag = np.full(k, 2.0 * lam)
    diag[0] = 3.0 * lam
    diag[-1] = (3 * N - 8) / (N - 4) * lam
    return np.diag(diag) + np.diag(np.full(k - 1, -g0), 1) + np.diag(np.full(k - 1, -lam * lam / g0), -1)


def tridiagonal_determinant(diag, upper, lower) -> float:
    """Continuant recursion D_i = a_iD_{i-1} - b_{i-1}c_{i-1}D_{i-2}"""
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    if len(upper) != len(diag) - 1 or len(lower) != len(diag) - 1:
        raise DomainError("off-diagonals must be one shorter than the diagonal")
    prev, current = 1.0, float(diag[0])
    for i in range(1, len(diag)):
        prev, current = current, diag[i] * current - upper[i - 1] * lower[i - 1] * prev
    return current


def q_determinant_target(N: int, k: int, lam: float) -> float:
    """(4Nk - 8k - 4)/(N-4) λ^k"""
    return (4 * N * k - 8 * k - 4) / (N - 4) * lam ** k


def q_matrix_certificate(dims: ProblemDims, lam: float, g0: float,
                         k: Optional[int] = None) -> Tuple[float, float]:
    """
    Determinant of Q by the tridiagonal recursion and its closed-form target

    Returns:
        (det_q, det_target)
    """
    k = dims.k if k is None else k
    Q = q_matrix(dims.N, k, lam, g0)
    det_q = tridiagonal_determinant(np.diag(Q), np.diag(Q, 1), np.diag(Q, -1))
    return det_q, q_determinant_target(dims.N, k, lam)


# ----------------------------------------------------------------------
# σ-Hessian certificate
# ----------------------------------------------------------------------

@dataclass
class SigmaHessianCertificate:
    """FD Hessian of ΔU₁,₀·U₁,₀ at the origin against the product-rule value"""
    N: int
    hessian: np.ndarray
    target: float
    printed_target: float
    g_hessian: Optional[np.ndarray] = None
    g_curvature_oracle: Optional[float] = None

    @property
    def diagonal_error(self) -> float:
        return float(np.max(np.abs(np.diag(self.hessian) - self.target)) / abs(self.target))

    @property
    def max_off_diagonal(self) -> float:
        off = self.hessian - np.diag(np.diag(self.hessian))
        return float(np.max(np.abs(off)))

    @property
    def g_isotropic(self) -> Optional[bool]:
        if self.g_hessian is None:
            return None
        diag = np.diag(self.g_hessian)
        off = self.g_hessian - np.diag(diag)
        return bool(np.all(diag != 0.0) and np.ptp(diag) <= 1e-6 * abs(diag[0])
                    and np.max(np.abs(off)) <= 1e-6 * abs(diag[0]))

    @property
    def g_oracle_error(self) -> Optional[float]:
        """Largest relative gap between the g-block diagonal and 2Γ''(0)"""
        if self.g_hessian is None or self.g_curvature_oracle is None:
            return None
        diag = np.diag(self.g_hessian)
        return float(np.max(np.abs(diag - self.g_curvature_oracle)) / abs(self.g_curvature_oracle))

    def check(self, rel_tol: float = 1e-6, off_tol: float = 1e-8,
              g_tol: float = G_ORACLE_TOL) -> Tuple[bool, Optional[str]]:
        if self.diagonal_error > rel_tol:
            return False, f"diagonal off by {self.diagonal_error:.2e} relative"
        if self.max_off_diagonal > off_tol:
            return False, f"off-diagonal entry {self.max_off_diagonal:.2e}"
        if abs(np.linalg.det(self.hessian)) == 0.0:
            return False, "degenerate Hessian"
        if self.g_isotropic is False:
            return False, "g-block is not a nonzero multiple of the identity"
        if self.g_oracle_error is not None and self.g_oracle_error > g_tol:
            return False, f"g-block off the curvature integral by {self.g_oracle_error:.2e} relative"
        return True, None


def sigma_hessian_certificate(dims: ProblemDims, h: float = SIGMA_STEP,
                              gamma: Optional[GammaKernel] = None,
                              gamma_step: float = G_BLOCK_STEP) -> SigmaHessianCertificate:
    """
    Hessian of ΔU₁,₀U₁,₀ at 0 by Richardson-extrapolated central differences

    The product rule at the origin gives α²(N-4)(2N²-4N-4) on the diagonal;
    the form α²(N-4)(2N²-6N-4) is carried as printed_target for reference.
    With a kernel, the Hessian of g = 2Γ at 0 is added together with the
    radial-integral value 2Γ''(0).
    """
    N = dims.N
    unit = BubbleParams(mu=1.0)

    def product(x: np.ndarray) -> float:
        return float(bubble_laplacian(dims, unit, x) * bubble_value(dims, unit, x))

    hessian = fd_hessian(product, np.zeros(N), h)
    alpha = alpha_n(N)
    cert = SigmaHessianCertificate(
        N=N,
        hessian=hessian,
        target=alpha ** 2 * (N - 4) * (2 * N * N - 4 * N - 4),
        printed_target=alpha ** 2 * (N - 4) * (2 * N * N - 6 * N - 4),
    )
    if gamma is not None:
        cert.g_hessian = fd_hessian(lambda x: 2.0 * gamma.of_point(x), np.zeros(N), gamma_step)
        cert.g_curvature_oracle = 2.0 * gamma_curvature(dims, gamma.quad).value
    return cert


# ----------------------------------------------------------------------
# Critical point
# ----------------------------------------------------------------------

def _record_matrix(name: str, matrix: np.ndarray) -> List[str]:
    rows = [f"{name}.shape={matrix.shape[0]}x{matrix.shape[1]}"]
    for i, row in enumerate(np.atleast_2d(matrix)):
        rows.append(f"{name}[{i}]=" + ",".join(f"{v:.16e}" for v in row))
    return rows


@dataclass
class CriticalCertificate:
    """Critical point of Φ at σ = 0 with its Hessian and Q-matrix checks"""
    point: ReducedPoint
    nu: np.ndarray
    grad_norm: float
    hessian: np.ndarray
    q_matrix: np.ndarray
    lam: float
    det_q: float
    det_target: float
    chain: np.ndarray
    iterations: int = 0
    det_hess_nu: float = 0.0
    g0: float = 0.0
    tol: float = GRAD_TOL

    @property
    def k(self) -> int:
        return self.point.k

    @property
    def chain_residual(self) -> float:
        return float(np.max(np.abs(self.chain - self.lam)) / self.lam)

    @property
    def off_block_max(self) -> float:
        k = self.k
        return float(np.max(np.abs(self.hessian[:k, k:]))) if self.hessian.shape[0] > k else 0.0

    @property
    def det_relative_error(self) -> float:
        return abs(self.det_q - self.det_target) / abs(self.det_target)

    @property
    def scaled_det_hess_nu(self) -> float:
        """Πν_i² det(Hess_ν Φ), equal to det Q at the critical point"""
        return float(np.prod(self.nu ** 2) * self.det_hess_nu)

    @property
    def sigma_diagonals(self) -> np.ndarray:
        return np.diag(self.hessian)[self.k:]

    def checks(self) -> List[Tuple[str, bool, str]]:
        return [
            ("gradient", self.grad_norm < self.tol, f"|grad| = {self.grad_norm:.3e}"),
            ("lambda", self.lam > 0, f"lambda = {self.lam:.12g}"),
            ("chain", self.chain_residual <= CHAIN_TOL, f"chain residual = {self.chain_residual:.3e}"),
            ("determinant", self.det_relative_error <= 1e-8,
             f"det Q = {self.det_q:.12g}, target {self.det_target:.12g}"),
            ("block structure", self.off_block_max < BLOCK_TOL,
             f"off-block max = {self.off_block_max:.3e}"),
            ("nondegenerate", self.det_hess_nu != 0.0 and bool(np.all(self.sigma_diagonals != 0.0)),
             f"det Hess_nu = {self.det_hess_nu:.6g}"),
        ]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks())

    def to_record(self) -> str:
        """key=value lines, matrices row-major, 17 significant digits"""
        lines = [
            f"k={self.k}",
            f"N={self.point.sigma.shape[1]}",
            f"d={self.point.d!r}",
            "mu=" + ",".join(f"{v:.16e}" for v in self.point.mu),
            "nu=" + ",".join(f"{v:.16e}" for v in self.nu),
            f"lambda={self.lam:.16e}",
            "chain=" + ",".join(f"{v:.16e}" for v in self.chain),
            f"chain_residual={self.chain_residual:.16e}",
            f"grad_norm={self.grad_norm:.16e}",
            f"iterations={self.iterations}",
            f"det_q={self.det_q:.16e}",
            f"det_target={self.det_target:.16e}",
            f"det_hess_nu={self.det_hess_nu:.16e}",
            f"scaled_det_hess_nu={self.scaled_det_hess_nu:.16e}",
            f"off_block_max={self.off_block_max:.16e}",
            f"passed={self.passed}",
        ]
        lines += _record_matrix("q_matrix", self.q_matrix)
        lines += _record_matrix("hessian", self.hessian)
        return "\n".join(lines) + "\n"


def certify(energy: ReducedEnergy, mu: np.ndarray, d: float = DEFAULT_BOX,
            iterations: int = 0, tol: float = GRAD_TOL) -> CriticalCertificate:
    """Assemble the certificate at (μ, 0)"""
    dims = energy.dims
    point = ReducedPoint.at_origin(mu, dims.N, d)
    k = point.k
    nu = point.mu ** dims.m
    hessian = energy.phi_hessian(point)
    grad = energy.phi_gradient(point)

    zeros = np.zeros(dims.N)
    g0 = energy.g_sigma(zeros)
    F0 = energy.f_sigma(zeros)
    chain = [2.0 * energy.H1 * nu[0] ** 2]
    chain += [g0 * nu[l + 1] / nu[l] for l in range(k - 1)]
    chain.append(energy.q * F0 * nu[-1] ** (-energy.q))
    chain = np.array(chain)
    lam = float(chain[0])

    det_q, det_target = q_matrix_certificate(dims, lam, g0, k)
    return CriticalCertificate(
        point=point,
        nu=nu,
        grad_norm=float(np.linalg.norm(grad)),
        hessian=hessian,
        q_matrix=q_matrix(dims.N, k, lam, g0),
        lam=lam,
        det_q=det_q,
        det_target=det_target,
        chain=chain,
        iterations=iterations,
        det_hess_nu=float(np.linalg.det(hessian[:k, :k])),
        g0=g0,
        tol=tol,
    )


def unit_start(N: int, k: int, d: float = DEFAULT_BOX) -> ReducedPoint:
    """μ ≡ 1 at σ = 0"""
    return ReducedPoint.at_origin(np.ones(k), N, d)


def find_critical_point(energy: ReducedEnergy, init: Optional[ReducedPoint] = None,
                        k: Optional[int] = None, d: float = DEFAULT_BOX,
                        tol: float = GRAD_TOL, max_iter: int = 100) -> CriticalCertificate:
    """
    Newton iteration for ∇_νΦ(ν, 0) = 0 in the variables x = ln ν

    Starts from μ ≡ 1 unless init is given, so the closed-form balance chain
    stays an independent check of the result. Steps are halved until Φ decreases (Armijo) or ‖∇_νΦ‖ decreases.

    Raises:
        BoxCollisionError: an iterate leaves d < μ_i < 1/d
        SingularStepError: the Newton system cannot be solved
        NewtonDivergenceError: no convergence within max_iter or a failed line search
    """
    dims = energy.dims
    if init is None:
        k = dims.k if k is None else k
        init = unit_start(dims.N, k, d)
    d = init.d
    ok, reason = init.feasible()
    if not ok:
        raise BoxCollisionError(f"initial point infeasible: {reason}", 0)

    k = init.k
    zeros = np.zeros((k, dims.N))
    gs, F = energy._ingredients(zeros)

    def gradient(x: np.ndarray) -> np.ndarray:
        return energy.gradient_nu(np.exp(x), gs, F)

    def value(x: np.ndarray) -> float:
        return energy.value_nu(np.exp(x), gs, F)

    x = np.log(init.mu ** dims.m)
    iterations = 0
    while True:
        nu = np.exp(x)
        grad_nu = gradient(x)
        grad_norm = float(np.linalg.norm(grad_nu))
        if not np.isfinite(grad_norm):
            raise NewtonDivergenceError("non-finite gradient", iterations, grad_norm)
        if grad_norm < tol:
            break
        if iterations >= max_iter:
            raise NewtonDivergenceError(f"no convergence after {max_iter} iterations",
                                        iterations, grad_norm)

        grad_x = nu * grad_nu
        hess_x = nu[:, None] * energy.hessian_nu(nu, gs, F) * nu[None, :] + np.diag(grad_x)
        try:
            step = np.linalg.solve(hess_x, -grad_x)
        except np.linalg.LinAlgError as exc:
            raise SingularStepError(f"Newton system singular: {exc}", iterations, grad_norm)
        if not np.all(np.isfinite(step)):
            raise SingularStepError("Newton step is not finite", iterations, grad_norm)

        phi0 = value(x)
        slope = float(grad_x @ step)
        t = 1.0
        while True:
            trial = x + t * step
            with np.errstate(over="ignore", invalid="ignore"):
                phi_t = value(trial)
                grad_t = float(np.linalg.norm(gradient(trial)))
            if np.isfinite(phi_t) and (phi_t <= phi0 + 1e-4 * t * slope or grad_t < grad_norm):
                break
            t *= 0.5
            if t < 1e-12:
                raise NewtonDivergenceError("line search failed", iterations, grad_norm)

        x = trial
        iterations += 1
        mu = np.exp(x) ** (1.0 / dims.m)
        if np.any(mu <= d) or np.any(mu >= 1.0 / d):
            raise BoxCollisionError(f"iterate mu={mu} left the box ({d}, {1.0 / d})",
                                    iterations, grad_norm)

    mu = np.exp(x) ** (1.0 / dims.m)
    return certify(energy, mu, d, iterations, tol)


def coercivity_scan(energy: ReducedEnergy, k: int, d: float = DEFAULT_BOX,
                    samples: int = 9) -> Tuple[float, float]:
    """
    Smallest Φ(μ, 0) on the boundary of the box d <= μ_i <= 1/d and at the
    closed-form critical point

    Returns:
        (boundary_min, interior_value)
    """
    N = energy.dims.N
    zeros = np.zeros((k, N))
    gs, F = energy._ingredients(zeros)
    axis = np.geomspace(d, 1.0 / d, samples)
    boundary_min = math.inf
    for mu in itertools.product(axis, repeat=k):
        mu = np.array(mu)
        if not (np.any(mu == d) or np.any(mu == 1.0 / d)):
            continue
        boundary_min = min(boundary_min, energy.value_nu(mu ** energy.dims.m, gs, F))
    interior = energy.value_nu(energy.balance_chain(k).nu, gs, F)
    return boundary_min, interior


def f_at_origin(dims: ProblemDims) -> float:
    """Closed form F(0) = 3|S^{N-1}|/(2(N+2))"""
    return 3.0 * sphere_measure(dims.N) / (2.0 * (dims.N + 2))
