"""
Radial Navier Solver
Biharmonic problems on the annulus ε < r < R with u = Δu = 0 on both spheres,
projections of the bubble and of Z⁰, the Robin function and the expansion check
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from src.bubble import (
    bubble_offset,
    bubble_radial,
    laplacian_offset,
    laplacian_radial,
    source_radial,
    z0_laplacian_radial,
    z0_radial,
    z0_source_radial,
)
from src.constants import ProblemDims, alpha_n
from src.errors import DomainError, RegimeError
from src.quadrature import IntegralResult, QuadratureEngine, gauss_partial

MIN_GRID_NODES = 256
NODES_PER_DECADE = 16
REGIME_RATIO = 0.1
# Below this multiple of ε the projection is evaluated through offsets from r = ε
NEAR_HOLE = 4.0


def _scalar_or_array(out: np.ndarray):
    return out[()] if out.ndim == 0 else out


# ----------------------------------------------------------------------
# Grid and fields
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Strictly increasing radii on [ε, R], log-graded

    Args:
        N: Space dimension
        epsilon: Hole radius (first node)
        nodes: Radii, nodes[0] = ε, nodes[-1] = R
    """
    N: int
    epsilon: float
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise DomainError("grid needs a 1D array of at least two radii")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("grid nodes must be strictly increasing")
        if nodes[0] != self.epsilon or not self.epsilon > 0:
            raise DomainError(f"first node must equal the hole radius {self.epsilon}")
        if self.N < 3:
            raise DomainError(f"radial Navier problems need N >= 3, got {self.N}")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def outer(self) -> float:
        return float(self.nodes[-1])

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def log_graded(cls, N: int, epsilon: float, n_nodes: int = 512, outer: float = 1.0,
                   focus_scales: Sequence[float] = ()) -> "RadialGrid":
        """
        Geometric grid on [ε, R] refined around each bubble scale

        Args:
            N: Space dimension
            epsilon: Hole radius
            n_nodes: Base node count (at least 256)
            outer: Outer radius R
            focus_scales: Scales μ_iε that get 32 nodes per decade on [μ/10, 10μ]
        """
        if not 0.0 < epsilon < outer:
            raise DomainError(f"need 0 < epsilon < outer, got ({epsilon}, {outer})")
        if n_nodes < MIN_GRID_NODES:
            raise DomainError(f"grid needs at least {MIN_GRID_NODES} nodes, got {n_nodes}")

        pieces = [np.geomspace(epsilon, outer, n_nodes)]
        for scale in focus_scales:
            lo, hi = max(epsilon, scale / 10.0), min(outer, scale * 10.0)
            if lo < hi:
                count = int(math.ceil(2 * NODES_PER_DECADE * math.log10(hi / lo))) + 1
                pieces.append(np.geomspace(lo, hi, count))

        log_nodes = np.unique(np.round(np.log(np.concatenate(pieces)), 12))
        nodes = np.exp(log_nodes)
        nodes[0], nodes[-1] = epsilon, outer
        return cls(N=N, epsilon=float(epsilon), nodes=nodes)

    def resolves(self, scale: float,
                 per_decade: int = NODES_PER_DECADE) -> Tuple[bool, Optional[str]]:
        """
        Check that the decade around a scale carries enough nodes

        Returns:
            (True, None) or (False, reason)
        """
        lo = max(self.epsilon, scale / math.sqrt(10.0))
        hi = min(self.outer, scale * math.sqrt(10.0))
        if lo >= hi:
            return True, None
        decades = math.log10(hi / lo)
        count = int(np.count_nonzero((self.nodes >= lo) & (self.nodes <= hi)))
        needed = int(math.floor(per_decade * decades))
        if count < needed:
            return False, f"scale {scale:.3e}: {count} nodes, need {needed}"
        return True, None


@dataclass(frozen=True, eq=False)
class RadialField:
    """
    Radial function sampled on a grid

    When an evaluator is attached it is the exact (or quadrature-exact)
    function and the samples are its node values; otherwise evaluation goes
    through a cubic spline in ln r.
    """
    grid: RadialGrid
    values: np.ndarray
    evaluator: Optional[Callable] = None
    error_estimate: float = 0.0
    resolved: bool = True
    laplacian: Optional["RadialField"] = None
    label: str = "value"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise DomainError(f"field has {values.shape} values for {len(self.grid)} nodes")
        if not np.all(np.isfinite(values)):
            raise DomainError(f"field '{self.label}' has non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(np.log(self.grid.nodes), self.values)

    def __call__(self, r):
        if self.evaluator is not None:
            return self.evaluator(r)
        r = np.asarray(r, dtype=float)
        return _scalar_or_array(np.asarray(self._spline(np.log(r))))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def combine(self, other: "RadialField", sign: float = 1.0,
                label: Optional[str] = None) -> "RadialField":
        """self + sign·other on the same grid"""
        if other.grid is not self.grid and not np.array_equal(other.nodes, self.nodes):
            raise DomainError("fields live on different grids")
        evaluator = None
        if self.evaluator is not None and other.evaluator is not None:
            mine, theirs = self.evaluator, other.evaluator
            evaluator = lambda r: mine(r) + sign * theirs(r)
        return RadialField(
            grid=self.grid,
            values=self.values + sign * other.values,
            evaluator=evaluator,
            error_estimate=self.error_estimate + other.error_estimate,
            resolved=self.resolved and other.resolved,
            label=label or self.label,
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.grid.nodes, self.label: self.values})

    def to_csv(self, path: str) -> str:
        """Two-column CSV (r, value) with 17 significant digits"""
        self.to_frame().to_csv(path, index=False, float_format="%.16e")
        return path


def sample_field(grid: RadialGrid, evaluator: Callable, label: str = "value",
                 error_estimate: float = 0.0) -> RadialField:
    """Wrap a vectorized radial function as a field on the grid"""
    return RadialField(grid=grid, values=evaluator(grid.nodes), evaluator=evaluator,
                       error_estimate=error_estimate, label=label)


# ----------------------------------------------------------------------
# Variation-of-parameters Poisson solver
# ----------------------------------------------------------------------

def _as_callable(rhs: Union[RadialField, Callable]) -> Callable:
    if isinstance(rhs, RadialField):
        return rhs.__call__
    if callable(rhs):
        return rhs
    raise DomainError("right-hand side must be a RadialField or a vectorized callable")


def poisson_solve_radial(rhs: Union[RadialField, Callable], grid: RadialGrid,
                         quad: Optional[QuadratureEngine] = None, order: int = 16,
                         tol: float = 1e-8, label: str = "w") -> RadialField:
    """
    Solve Δw = rhs on ε < r < R with w(ε) = w(R) = 0

    Uses w = A(r) - A(R)β(r) with
    A(r) = (∫_ε^r s g ds - r^{2-N}∫_ε^r s^{N-1} g ds)/(N-2) and
    β = (r^{2-N} - ε^{2-N})/(R^{2-N} - ε^{2-N}). Panel integrals come from
    Gauss-Legendre rules on the grid panels, so the result can be evaluated
    at any radius, not only at the nodes.

    Args:
        rhs: Field or vectorized callable g(r)
        grid: Radial grid (panels are consecutive nodes)
        quad: Engine providing the panel rules
        order: Gauss order per panel (error estimate from order/2)
        tol: Relative tolerance above which the grid is flagged as too coarse

    Returns:
        RadialField with an attached evaluator and error estimate
    """
    quad = quad or QuadratureEngine()
    g = _as_callable(rhs)
    N = grid.N
    nodes = grid.nodes
    a, b = grid.epsilon, grid.outer

    def weight_1(s):
        return s * g(s)

    def weight_n(s):
        return s ** (N - 1) * g(s)

    panel_1, err_1 = quad.integrate_panels(weight_1, nodes, order)
    panel_n, err_n = quad.integrate_panels(weight_n, nodes, order)
    cum_1 = np.concatenate([[0.0], np.cumsum(panel_1)])
    cum_n = np.concatenate([[0.0], np.cumsum(panel_n)])
    cum_err_1 = np.concatenate([[0.0], np.cumsum(err_1)])
    cum_err_n = np.concatenate([[0.0], np.cumsum(err_n)])

    outer_particular = (cum_1[-1] - b ** (2 - N) * cum_n[-1]) / (N - 2)
    beta_scale = np.expm1((N - 2) * math.log(a / b))

    def beta(r):
        return np.expm1((N - 2) * np.log(a / r)) / beta_scale

    def evaluator(r):
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        j = np.clip(np.searchsorted(nodes, flat, side="right") - 1, 0, len(nodes) - 2)
        left = nodes[j]
        i_1 = cum_1[j] + gauss_partial(weight_1, left, flat, order)
        i_n = cum_n[j] + gauss_partial(weight_n, left, flat, order)
        out = (i_1 - flat ** (2 - N) * i_n) / (N - 2) - outer_particular * beta(flat)
        return _scalar_or_array(out.reshape(r.shape))

    values = (cum_1 - nodes ** (2 - N) * cum_n) / (N - 2) - outer_particular * beta(nodes)
    values[0] = 0.0
    values[-1] = 0.0

    outer_error = (cum_err_1[-1] + b ** (2 - N) * cum_err_n[-1]) / (N - 2)
    node_error = (cum_err_1 + nodes ** (2 - N) * cum_err_n) / (N - 2) + np.abs(beta(nodes)) * outer_error
    error = float(np.max(node_error))
    scale = max(1.0, float(np.max(np.abs(values))))
    resolved = error <= tol * scale
    if not resolved:
        print(f"⚠️ Poisson solve '{label}': error estimate {error:.3e} exceeds "
              f"{tol:.1e} (grid too coarse, {len(nodes)} nodes)")

    return RadialField(grid=grid, values=values, evaluator=evaluator,
                       error_estimate=error, resolved=resolved, label=label)


def navier_biharmonic_solve(f: Union[RadialField, Callable], grid: RadialGrid,
                            quad: Optional[QuadratureEngine] = None,
                            tol: float = 1e-8, label: str = "w") -> RadialField:
    """
    Solve Δ²w = f with w = Δw = 0 at r = ε and r = R

    Two chained Dirichlet problems: Δv = f, then Δw = v. The returned field
    carries v as its laplacian.
    """
    v = poisson_solve_radial(f, grid, quad, tol=tol, label=f"laplacian_{label}")
    w = poisson_solve_radial(v, grid, quad, tol=tol, label=label)
    # sup-norm bound of the Dirichlet Green operator on (ε, R)
    green_bound = grid.outer ** 2 / (2.0 * grid.N)
    error = w.error_estimate + v.error_estimate * green_bound
    return RadialField(grid=grid, values=w.values, evaluator=w.evaluator,
                       error_estimate=error, resolved=v.resolved and w.resolved,
                       laplacian=v, label=label)


# ----------------------------------------------------------------------
# Closed-form Navier projection
# ----------------------------------------------------------------------

class BubbleProfile:
    """U_{μ,0} with cancellation-free offsets"""

    def __init__(self, dims: ProblemDims, mu: float):
        if not mu > 0:
            raise DomainError(f"bubble scale must be positive, got {mu}")
        self.dims = dims
        self.mu = mu

    def value(self, r):
        return bubble_radial(self.dims, self.mu, r)

    def laplacian(self, r):
        return laplacian_radial(self.dims, self.mu, r)

    def source(self, r):
        return source_radial(self.dims, self.mu, r)

    def value_offset(self, r, r0):
        return bubble_offset(self.dims, self.mu, r, r0)

    def laplacian_offset(self, r, r0):
        return laplacian_offset(self.dims, self.mu, r, r0)


class Z0Profile(BubbleProfile):
    """Z⁰_{μ,0} = ∂U/∂μ"""

    def value(self, r):
        return z0_radial(self.dims, self.mu, r)

    def laplacian(self, r):
        return z0_laplacian_radial(self.dims, self.mu, r)

    def source(self, r):
        return z0_source_radial(self.dims, self.mu, r)

    def value_offset(self, r, r0):
        return self.value(r) - self.value(r0)

    def laplacian_offset(self, r, r0):
        return self.laplacian(r) - self.laplacian(r0)


@dataclass(frozen=True)
class NavierCorrection:
    """
    Biharmonic h = A(ε/r)^{N-2} + B(ε/r)^{N-4} + C + Dr² on (ε, R)

    Matches prescribed (h, Δh) at r = ε and vanishes with its Laplacian at r = R.
    """
    N: int
    epsilon: float
    outer: float
    A: float
    B: float
    C: float
    D: float

    @classmethod
    def from_inner_data(cls, N: int, epsilon: float, outer: float,
                        value: float, laplacian: float) -> "NavierCorrection":
        rho = (epsilon / outer) ** (N - 2)
        tau = (epsilon / outer) ** (N - 4)
        b_prime = laplacian / (1.0 - rho)
        B = b_prime * epsilon ** 2 / (2.0 * (4 - N))
        D = -b_prime * rho / (2.0 * N)
        A = (value - B * (1.0 - tau) - D * (epsilon ** 2 - outer ** 2)) / (1.0 - rho)
        # h(R) = 0 solved for C keeps every term of the same order in ε
        C = -(A * rho + B * tau + D * outer ** 2)
        return cls(N=N, epsilon=epsilon, outer=outer, A=A, B=B, C=C, D=D)

    @property
    def laplacian_coefficient(self) -> float:
        """b' in Δh = b'(ε/r)^{N-2} + 2ND"""
        return 2.0 * (4 - self.N) * self.B / self.epsilon ** 2

    def value(self, r):
        q = self.epsilon / np.asarray(r, dtype=float)
        N = self.N
        return self.A * q ** (N - 2) + self.B * q ** (N - 4) + self.C + self.D * np.square(r)

    def laplacian(self, r):
        q = self.epsilon / np.asarray(r, dtype=float)
        return self.laplacian_coefficient * q ** (self.N - 2) + 2.0 * self.N * self.D

    def value_offset(self, r):
        """h(r) - h(ε)"""
        x = np.log(self.epsilon / np.asarray(r, dtype=float))
        N = self.N
        return (self.A * np.expm1((N - 2) * x) + self.B * np.expm1((N - 4) * x)
                + self.D * (np.square(r) - self.epsilon ** 2))

    def laplacian_offset(self, r):
        """Δh(r) - Δh(ε)"""
        x = np.log(self.epsilon / np.asarray(r, dtype=float))
        return self.laplacian_coefficient * np.expm1((self.N - 2) * x)


class NavierProjection:
    """
    Closed-form P_ε u for a profile with Δ²u = source on all of R^N

    P_εu = u - h_Ω - h_ε, where h_Ω = A + Br² removes the boundary data at
    r = R and h_ε (a NavierCorrection) removes what is left at r = ε.
    Both corrections are nonnegative for the bubble.
    """

    def __init__(self, profile: BubbleProfile, N: int, epsilon: float, outer: float = 1.0):
        if not 0.0 < epsilon < outer:
            raise DomainError(f"need 0 < epsilon < outer, got ({epsilon}, {outer})")
        self.profile = profile
        self.N = N
        self.epsilon = float(epsilon)
        self.outer = float(outer)

        self.ball_B = float(profile.laplacian(outer)) / (2.0 * N)
        self.ball_A = float(profile.value(outer)) - self.ball_B * outer ** 2

        inner_value = float(profile.value(epsilon)) - self.ball_A - self.ball_B * epsilon ** 2
        inner_laplacian = float(profile.laplacian(epsilon)) - 2.0 * N * self.ball_B
        self.hole = NavierCorrection.from_inner_data(N, self.epsilon, self.outer,
                                                     inner_value, inner_laplacian)

    def ball_correction(self, r):
        return self.ball_A + self.ball_B * np.square(r)

    def ball_projection(self, r):
        """P_Ω u on the unpunctured ball"""
        return self.profile.value(r) - self.ball_correction(r)

    def hole_correction(self, r):
        return self.hole.value(r)

    def defect(self, r):
        """P_εu - u"""
        return -(self.ball_correction(r) + self.hole.value(r))

    def value(self, r):
        r = np.asarray(r, dtype=float)
        eps = self.epsilon
        direct = self.profile.value(r) - self.ball_correction(r) - self.hole.value(r)
        near = (self.profile.value_offset(r, eps) - self.ball_B * (np.square(r) - eps ** 2)
                - self.hole.value_offset(r))
        return _scalar_or_array(np.where(r <= NEAR_HOLE * eps, near, direct))

    def laplacian(self, r):
        r = np.asarray(r, dtype=float)
        eps = self.epsilon
        direct = self.profile.laplacian(r) - 2.0 * self.N * self.ball_B - self.hole.laplacian(r)
        near = self.profile.laplacian_offset(r, eps) - self.hole.laplacian_offset(r)
        return _scalar_or_array(np.where(r <= NEAR_HOLE * eps, near, direct))

    def source(self, r):
        return self.profile.source(r)

    def field(self, grid: RadialGrid, label: str = "projection") -> RadialField:
        lap = sample_field(grid, self.laplacian, label=f"laplacian_{label}")
        return RadialField(grid=grid, values=self.value(grid.nodes), evaluator=self.value,
                           laplacian=lap, label=label)


def navier_projection(dims: ProblemDims, mu: float, epsilon: float,
                      outer: float = 1.0) -> NavierProjection:
    """Closed-form P_εU_{μ,0} on the annulus ε < r < outer"""
    return NavierProjection(BubbleProfile(dims, mu), dims.N, epsilon, outer)


def z0_projection(dims: ProblemDims, mu: float, epsilon: float,
                  outer: float = 1.0) -> NavierProjection:
    """Closed-form P_εZ⁰_{μ,0}"""
    return NavierProjection(Z0Profile(dims, mu), dims.N, epsilon, outer)


def _check_grid(dims: ProblemDims, grid: RadialGrid):
    if grid.N != dims.N:
        raise DomainError(f"grid is for N={grid.N}, dims has N={dims.N}")


def project_bubble(dims: ProblemDims, mu: float, grid: RadialGrid,
                   quad: Optional[QuadratureEngine] = None,
                   method: str = "exact") -> RadialField:
    """
    P_εU_{μ,0} on the grid

    Args:
        method: "exact" for the closed form, "quadrature" for the two-stage
            variation-of-parameters solve with right-hand side U^p
    """
    _check_grid(dims, grid)
    if method == "exact":
        return navier_projection(dims, mu, grid.epsilon, grid.outer).field(grid, "PU")
    if method == "quadrature":
        return navier_biharmonic_solve(lambda r: source_radial(dims, mu, r), grid, quad, label="PU")
    raise DomainError(f"unknown projection method {method!r}")


def project_z0(dims: ProblemDims, mu: float, grid: RadialGrid,
               quad: Optional[QuadratureEngine] = None,
               method: str = "exact") -> RadialField:
    """P_εZ⁰_{μ,0} on the grid (solves Δ²w = pU^{p-1}Z⁰ with Navier conditions)"""
    _check_grid(dims, grid)
    if method == "exact":
        return z0_projection(dims, mu, grid.epsilon, grid.outer).field(grid, "PZ0")
    if method == "quadrature":
        return navier_biharmonic_solve(lambda r: z0_source_radial(dims, mu, r), grid, quad, label="PZ0")
    raise DomainError(f"unknown projection method {method!r}")


def pz_inner_products(dims: ProblemDims, mu: float, epsilon: float, quad: QuadratureEngine,
                      outer: float = 1.0) -> Tuple[IntegralResult, IntegralResult]:
    """
    ⟨ΔPZ⁰, ΔPZ⁰⟩ computed as ∫|ΔPZ⁰|² and as ∫pU^{p-1}Z⁰·PZ⁰

    The two agree by integration by parts under Navier conditions.
    """
    projection = z0_projection(dims, mu, epsilon, outer)
    scales = (mu, 10.0 * epsilon)
    energy = quad.integrate_annulus(lambda r: projection.laplacian(r) ** 2,
                                    dims.N, epsilon, outer, scales)
    source = quad.integrate_annulus(lambda r: projection.source(r) * projection.value(r),
                                    dims.N, epsilon, outer, scales)
    return energy, source


# ----------------------------------------------------------------------
# Robin function
# ----------------------------------------------------------------------

def robin_coefficients(N: int, radius: float = 1.0) -> Tuple[float, float]:
    """
    H(x, 0) = a + b|x|² on the ball of the given radius

    Bounded biharmonic extension matching H = r^{4-N} and ΔH = 2(4-N)r^{2-N}
    at r = radius.
    """
    if N < 5:
        raise DomainError(f"Robin function needs N >= 5, got {N}")
    if not radius > 0:
        raise DomainError(f"ball radius must be positive, got {radius}")
    system = np.array([[1.0, radius ** 2], [0.0, 2.0 * N]])
    data = np.array([radius ** (4 - N), 2.0 * (4 - N) * radius ** (2 - N)])
    a, b = np.linalg.solve(system, data)
    return float(a), float(b)


def robin_function(N: int, radius: float = 1.0) -> float:
    """H(0, 0), the Robin function at the center of the ball"""
    return robin_coefficients(N, radius)[0]


# ----------------------------------------------------------------------
# Expansion of the projection
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectionExpansion:
    """
    Splitting of P_εU_{μ,0} into bubble, Robin term, hole profiles and remainder

    remainder is R = P_εU - U + αμ^{(N-4)/2}H + a1(ε/r)^{N-4} + a2(ε/r)^{N-2};
    outer_defect is P_ΩU - U + αμ^{(N-4)/2}H (independent of ε);
    hole_remainder is P_εU - P_ΩU + â1Pφ1 + â2Pφ2 with Navier-projected profiles.
    """
    mu: float
    epsilon: float
    a1: float
    a2: float
    a1_hat: float
    a2_hat: float
    robin_term: RadialField
    remainder: RadialField
    outer_defect: RadialField
    hole_remainder: RadialField
    envelope: RadialField
    hole_correction: NavierCorrection

    def envelope_ratio(self) -> float:
        """sup over the grid of |hole remainder| / envelope"""
        return float(np.max(np.abs(self.hole_remainder.values) / self.envelope.values))


def hole_coefficients(dims: ProblemDims, mu: float, epsilon: float) -> Tuple[float, float]:
    """a1, a2 of the hole profiles (ε/r)^{N-4}, (ε/r)^{N-2}"""
    N = dims.N
    u0 = float(bubble_radial(dims, 1.0, 0.0))
    lap0 = float(laplacian_radial(dims, 1.0, 0.0))
    tail = lap0 / (2.0 * (N - 4)) * epsilon ** 2 / mu ** (N / 2.0)
    return -tail, u0 / mu ** dims.m + tail


def expansion_decompose(dims: ProblemDims, mu: float, grid: RadialGrid) -> ProjectionExpansion:
    """
    Decompose the closed-form projection on the grid

    Raises:
        RegimeError: when ε/μ is not small (ε/μ >= 0.1)
    """
    _check_grid(dims, grid)
    N = dims.N
    eps, outer = grid.epsilon, grid.outer
    if eps / mu >= REGIME_RATIO:
        raise RegimeError(f"ε/μ = {eps / mu:.3g} is not small (need < {REGIME_RATIO})")

    projection = navier_projection(dims, mu, eps, outer)
    alpha = alpha_n(N)
    a1, a2 = hole_coefficients(dims, mu, eps)
    h_a, h_b = robin_coefficients(N, outer)

    def robin_term(r):
        return alpha * mu ** dims.m * (h_a + h_b * np.square(r))

    def outer_defect(r):
        return robin_term(r) - projection.ball_correction(r)

    def remainder(r):
        q = eps / np.asarray(r, dtype=float)
        return projection.defect(r) + robin_term(r) + a1 * q ** (N - 4) + a2 * q ** (N - 2)

    ball_value_0 = alpha * mu ** (-dims.m) - projection.ball_A
    ball_laplacian_0 = float(laplacian_radial(dims, mu, 0.0)) - 2.0 * N * projection.ball_B
    a1_hat = -ball_laplacian_0 * eps ** 2 / (2.0 * (N - 4))
    a2_hat = ball_value_0 - a1_hat

    inner_value = -float(bubble_offset(dims, mu, eps, 0.0)) + projection.ball_B * eps ** 2
    inner_laplacian = -float(laplacian_offset(dims, mu, eps, 0.0))
    hole = NavierCorrection.from_inner_data(N, eps, outer, inner_value, inner_laplacian)

    def envelope(r):
        r = np.asarray(r, dtype=float)
        return (eps ** (N - 1) / mu ** ((N + 2) / 2.0) * r ** (4 - N)
                + eps ** (N - 1) / mu ** ((N - 2) / 2.0) * r ** (2 - N))

    return ProjectionExpansion(
        mu=mu,
        epsilon=eps,
        a1=a1,
        a2=a2,
        a1_hat=a1_hat,
        a2_hat=a2_hat,
        robin_term=sample_field(grid, robin_term, "robin_term"),
        remainder=sample_field(grid, remainder, "remainder"),
        outer_defect=sample_field(grid, outer_defect, "outer_defect"),
        hole_remainder=sample_field(grid, hole.value, "hole_remainder"),
        envelope=sample_field(grid, envelope, "envelope"),
        hole_correction=hole,
    )
