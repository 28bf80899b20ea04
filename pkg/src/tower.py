"""
Bubble Tower
Sign-alternating superposition of projected bubbles, Lebesgue norms,
the residual split W1 + W2 and the energy J_ε(V)
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.bubble import bubble_radial, nonlinearity
from src.constants import ProblemDims, alpha_n, closed_form_constants, sphere_measure
from src.errors import DomainError, ScaleOrderingError
from src.quadrature import IntegralResult, QuadratureEngine
from src.radial_solver import NavierProjection, RadialField, RadialGrid, navier_projection, robin_function

DECOMPOSITION_RADIUS = 0.5


@dataclass(frozen=True, eq=False)
class TowerConfig:
    """
    Tower parameters

    Args:
        dims: Problem dimensions (k = number of bubbles)
        epsilon: Hole radius
        mu: Interior scales μ_1..μ_k
        outer: Ball radius
        decomposition_radius: Outer radius r of the annulus decomposition
    """
    dims: ProblemDims
    epsilon: float
    mu: np.ndarray
    outer: float = 1.0
    decomposition_radius: float = DECOMPOSITION_RADIUS

    @property
    def k(self) -> int:
        return len(self.mu)

    @property
    def scales(self) -> np.ndarray:
        """μ_iε = μ_i ε^{(2i-1)θ/(2k)}"""
        exponents = np.array([float(self.dims.scale_exponent(i)) for i in range(1, self.k + 1)])
        return self.mu * self.epsilon ** exponents


@dataclass(frozen=True, eq=False)
class AnnulusDecomposition:
    """
    Boundaries r = b_0 > b_1 > ... > b_k = ε with b_l = √(μ_lε μ_(l+1)ε)

    A_l = {b_l < |x| < b_(l-1)}, l = 1..k.
    """
    boundaries: np.ndarray

    @property
    def k(self) -> int:
        return len(self.boundaries) - 1

    def annulus(self, l: int) -> Tuple[float, float]:
        """(inner, outer) radii of A_l, l counted from 1"""
        if not 1 <= l <= self.k:
            raise DomainError(f"annulus index must be in 1..{self.k}, got {l}")
        return float(self.boundaries[l]), float(self.boundaries[l - 1])

    def annuli(self) -> List[Tuple[float, float]]:
        return [self.annulus(l) for l in range(1, self.k + 1)]

    def tiles(self) -> bool:
        """Annuli are disjoint and cover ε < |x| < r"""
        pieces = sorted(self.annuli())
        if pieces[0][0] != self.boundaries[-1] or pieces[-1][1] != self.boundaries[0]:
            return False
        return all(a[1] == b[0] and a[0] < a[1] for a, b in zip(pieces, pieces[1:])) and pieces[-1][0] < pieces[-1][1]


def annulus_decomposition(cfg: TowerConfig) -> AnnulusDecomposition:
    scales = cfg.scales
    inner = np.sqrt(scales[:-1] * scales[1:])
    return AnnulusDecomposition(np.concatenate([[cfg.decomposition_radius], inner, [cfg.epsilon]]))


def tower_scales(dims: ProblemDims, epsilon: float, mu: Sequence[float], outer: float = 1.0,
                 decomposition_radius: float = DECOMPOSITION_RADIUS) -> TowerConfig:
    """
    Build the tower configuration and check the scale ordering

    Raises:
        DomainError: wrong number of scales or nonpositive inputs
        ScaleOrderingError: μ_1ε > ... > μ_kε > ε or the annulus ordering fails
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if len(mu) != dims.k:
        raise DomainError(f"expected {dims.k} scales, got {len(mu)}")
    if not np.all(mu > 0) or not 0.0 < epsilon < decomposition_radius < outer:
        raise DomainError("need positive scales and 0 < epsilon < decomposition radius < outer")

    cfg = TowerConfig(dims=dims, epsilon=float(epsilon), mu=mu, outer=float(outer),
                      decomposition_radius=float(decomposition_radius))
    scales = cfg.scales
    if np.any(np.diff(scales) >= 0) or scales[-1] <= epsilon:
        raise ScaleOrderingError(f"scales {scales} are not strictly ordered above ε={epsilon}")
    if np.any(np.diff(annulus_decomposition(cfg).boundaries) >= 0):
        raise ScaleOrderingError(f"annulus boundaries are not decreasing for scales {scales}")
    return cfg


# ----------------------------------------------------------------------
# Tower
# ----------------------------------------------------------------------

def _power_offset(u, d, power: float):
    """(u+d)^power - u^power for u > 0, d >= -u, without cancellation"""
    ratio = np.maximum(np.asarray(d, dtype=float) / u, -1.0)
    with np.errstate(divide="ignore"):
        return u ** power * np.expm1(power * np.log1p(ratio))


class BubbleTower:
    """
    V = Σ s_i P_εU_{μ_iε,0} with s_i = (-1)^{i+1}

    Projections are the closed forms of radial_solver, so every quantity
    here can be evaluated at any radius.
    """

    def __init__(self, cfg: TowerConfig, signs: Optional[Sequence[float]] = None):
        self.cfg = cfg
        self.dims = cfg.dims
        self.scales = cfg.scales
        self.projections: List[NavierProjection] = [
            navier_projection(cfg.dims, s, cfg.epsilon, cfg.outer) for s in self.scales
        ]
        if signs is None:
            signs = [(-1.0) ** i for i in range(cfg.k)]
        if len(signs) != cfg.k:
            raise DomainError(f"need {cfg.k} signs, got {len(signs)}")
        self.signs = np.asarray(signs, dtype=float)
        self.decomposition = annulus_decomposition(cfg)

    @property
    def k(self) -> int:
        return self.cfg.k

    def bubble(self, i: int, r):
        return bubble_radial(self.dims, self.scales[i], r)

    def projected(self, i: int, r):
        return self.projections[i].value(r)

    def defect(self, i: int, r):
        """P_εU_i - U_i"""
        return self.projections[i].defect(r)

    def value(self, r):
        return sum(s * p.value(r) for s, p in zip(self.signs, self.projections))

    def laplacian(self, r):
        return sum(s * p.laplacian(r) for s, p in zip(self.signs, self.projections))

    def negated(self) -> "BubbleTower":
        return BubbleTower(self.cfg, -self.signs)

    def pieces(self) -> List[Tuple[float, float]]:
        """Integration intervals covering (ε, R): the annuli plus the outer shell"""
        intervals = sorted(self.decomposition.annuli())
        intervals.append((self.cfg.decomposition_radius, self.cfg.outer))
        return intervals

    def integrate(self, f: Callable[[float], float], quad: QuadratureEngine,
                  interval: Optional[Tuple[float, float]] = None) -> IntegralResult:
        """Volume integral of a radial function over Ω_ε or over a sub-annulus"""
        N = self.dims.N
        breakpoints = list(self.scales)
        if interval is not None:
            return quad.integrate_annulus(f, N, interval[0], interval[1], breakpoints)
        total = None
        for a, b in self.pieces():
            piece = quad.integrate_annulus(f, N, a, b, breakpoints)
            total = piece if total is None else total + piece
        return total


def _as_tower(obj: Union[TowerConfig, BubbleTower]) -> BubbleTower:
    return obj if isinstance(obj, BubbleTower) else BubbleTower(obj)


def assemble_tower(cfg: Union[TowerConfig, BubbleTower], grid: RadialGrid) -> RadialField:
    """
    V on the grid with its exact evaluator and Laplacian

    Prints a warning and marks the field unresolved when the grid does not
    carry enough nodes per decade around some μ_iε.
    """
    tower = _as_tower(cfg)
    if grid.N != tower.dims.N or grid.epsilon != tower.cfg.epsilon:
        raise DomainError("grid does not match the tower (N or ε differ)")

    resolved = True
    for scale in tower.scales:
        ok, reason = grid.resolves(scale)
        if not ok:
            resolved = False
            print(f"⚠️ Unresolved tower scale: {reason}")

    lap = RadialField(grid=grid, values=tower.laplacian(grid.nodes), evaluator=tower.laplacian,
                      label="laplacian_V")
    return RadialField(grid=grid, values=tower.value(grid.nodes), evaluator=tower.value,
                       resolved=resolved, laplacian=lap, label="V")


def count_sign_changes(field_or_values: Union[RadialField, np.ndarray], tol: float = 1e-8) -> int:
    """Sign changes between nodes where |V| exceeds tol·max|V|"""
    values = getattr(field_or_values, "values", field_or_values)
    values = np.asarray(values, dtype=float)
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    if scale == 0.0:
        return 0
    signs = np.sign(values[np.abs(values) > tol * scale])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def outer_sup(field: RadialField, r_min: float = DECOMPOSITION_RADIUS) -> float:
    """sup |V| over the grid nodes with r > r_min"""
    mask = field.grid.nodes > r_min
    return float(np.max(np.abs(field.values[mask]))) if np.any(mask) else 0.0


# ----------------------------------------------------------------------
# Norms
# ----------------------------------------------------------------------

def lq_integral(field: RadialField, q: float, quad: QuadratureEngine,
                interval: Optional[Tuple[float, float]] = None,
                scales: Sequence[float] = ()) -> IntegralResult:
    """∫|u|^q over ε < |x| < R (or a sub-annulus)"""
    if q < 1:
        raise DomainError(f"Lebesgue exponent must be >= 1, got {q}")
    a, b = interval if interval is not None else (field.grid.epsilon, field.grid.outer)
    return quad.integrate_annulus(lambda r: abs(float(field(r))) ** q, field.grid.N, a, b, scales)


def lq_norm(field: RadialField, q: float, quad: QuadratureEngine,
            interval: Optional[Tuple[float, float]] = None,
            scales: Sequence[float] = ()) -> float:
    """|u|_q = (∫|u|^q)^{1/q}"""
    return lq_integral(field, q, quad, interval, scales).value ** (1.0 / q)


@dataclass
class ResidualNorm:
    """A β-norm with its error estimate and per-annulus breakdown of ∫|·|^β"""
    name: str
    value: float
    error_estimate: float
    exponent: float
    breakdown: Dict[str, float] = field(default_factory=dict)
    converged: bool = True


def _norm_from_integral(name: str, integral: IntegralResult, beta: float,
                        breakdown: Dict[str, float]) -> ResidualNorm:
    value = max(integral.value, 0.0) ** (1.0 / beta)
    if integral.value > 0:
        error = value * integral.error_estimate / (beta * integral.value)
    else:
        error = integral.error_estimate ** (1.0 / beta)
    return ResidualNorm(name=name, value=value, error_estimate=error, exponent=beta,
                        breakdown=breakdown, converged=integral.converged)


def _beta_norm(tower: BubbleTower, name: str, integrand: Callable[[float], float],
               quad: QuadratureEngine, extra: Optional[Dict[str, float]] = None) -> ResidualNorm:
    beta = float(tower.dims.beta)
    breakdown: Dict[str, float] = {}
    total = None
    for l, interval in enumerate(tower.decomposition.annuli(), start=1):
        piece = tower.integrate(lambda r: abs(integrand(r)) ** beta, quad, interval)
        breakdown[f"A{l}"] = piece.value
        total = piece if total is None else total + piece
    outer = tower.integrate(lambda r: abs(integrand(r)) ** beta, quad,
                            (tower.cfg.decomposition_radius, tower.cfg.outer))
    breakdown["outer"] = outer.value
    total = total + outer
    if extra:
        breakdown.update(extra)
    return _norm_from_integral(name, total, beta, breakdown)


def residual_w1(cfg: Union[TowerConfig, BubbleTower], quad: QuadratureEngine) -> ResidualNorm:
    """
    W1 = |f(V) - Σ s_j f(PU_j)|_{2N/(N+4)}

    The breakdown also carries the cross terms ∫_{A_l}|U_l^{p-1}U_(l+1)|^β.
    """
    tower = _as_tower(cfg)
    dims = tower.dims
    p = dims.p_value
    beta = float(dims.beta)

    def integrand(r: float) -> float:
        v = tower.value(r)
        parts = sum(s * nonlinearity(dims, tower.projected(i, r)) for i, s in enumerate(tower.signs))
        return float(nonlinearity(dims, v) - parts)

    if tower.k == 1:
        zero = IntegralResult(0.0, 0.0, 0, quad.abs_tol, quad.rel_tol)
        return _norm_from_integral("W1", zero, beta, {"A1": 0.0, "outer": 0.0})

    cross: Dict[str, float] = {}
    for l in range(1, tower.k):
        interval = tower.decomposition.annulus(l)
        result = tower.integrate(
            lambda r: (tower.bubble(l - 1, r) ** (p - 1.0) * tower.bubble(l, r)) ** beta, quad, interval)
        cross[f"cross_A{l}"] = result.value
    return _beta_norm(tower, "W1", integrand, quad, cross)


def residual_w2(cfg: Union[TowerConfig, BubbleTower], quad: QuadratureEngine) -> ResidualNorm:
    """
    W2 = |Σ s_j [f(PU_j) - f(U_j)]|_{2N/(N+4)}

    The breakdown carries the linear part W21 = |Σ s_j pU_j^{p-1}(PU_j - U_j)|_β
    and the power part W22 = |Σ|PU_j - U_j|^p|_β as norms.
    """
    tower = _as_tower(cfg)
    p = tower.dims.p_value

    def integrand(r: float) -> float:
        return float(sum(s * _power_offset(tower.bubble(i, r), tower.defect(i, r), p)
                         for i, s in enumerate(tower.signs)))

    def linear(r: float) -> float:
        return float(sum(s * p * tower.bubble(i, r) ** (p - 1.0) * tower.defect(i, r)
                         for i, s in enumerate(tower.signs)))

    def power(r: float) -> float:
        return float(sum(np.abs(tower.defect(i, r)) ** p for i in range(tower.k)))

    w21 = _beta_norm(tower, "W21", linear, quad)
    w22 = _beta_norm(tower, "W22", power, quad)
    return _beta_norm(tower, "W2", integrand, quad, {"W21": w21.value, "W22": w22.value})


def f_prime_comparison(cfg: Union[TowerConfig, BubbleTower], index: int,
                       quad: QuadratureEngine) -> ResidualNorm:
    """|[f'(U_i) - f'(V)]U_i|_{2N/(N+4)}, index counted from 0"""
    tower = _as_tower(cfg)
    dims = tower.dims
    if not 0 <= index < tower.k:
        raise DomainError(f"bubble index must be in 0..{tower.k - 1}, got {index}")

    def integrand(r: float) -> float:
        u = tower.bubble(index, r)
        return float((nonlinearity(dims, u, 1) - nonlinearity(dims, tower.value(r), 1)) * u)

    return _beta_norm(tower, f"fprime_U{index + 1}", integrand, quad)


# ----------------------------------------------------------------------
# Energy
# ----------------------------------------------------------------------

def bilinear_form(cfg: Union[TowerConfig, BubbleTower], i: int, j: int,
                  quad: QuadratureEngine) -> IntegralResult:
    """⟨ΔPU_i, ΔPU_j⟩ = ∫ U_i^p PU_j over Ω_ε (indices from 0)"""
    tower = _as_tower(cfg)
    p = tower.dims.p_value
    return tower.integrate(lambda r: tower.bubble(i, r) ** p * tower.projected(j, r), quad)


def dirichlet_energy(cfg: Union[TowerConfig, BubbleTower], quad: QuadratureEngine) -> IntegralResult:
    """∫|ΔV|² from the closed-form Laplacians of the projections"""
    tower = _as_tower(cfg)
    return tower.integrate(lambda r: tower.laplacian(r) ** 2, quad)


@dataclass
class TowerEnergy:
    """J_ε(V) and its excess over k whole-space bubble energies"""
    value: float
    excess: float
    quadratic: float
    potential: float
    bubble_energy: float
    bilinear: np.ndarray
    error_estimate: float


def _outside_energy(tower: BubbleTower, i: int, quad: QuadratureEngine) -> IntegralResult:
    """∫U_i^{p+1} over the hole and outside the ball"""
    dims = tower.dims
    p = dims.p_value
    scale = tower.scales[i]
    f = lambda r: bubble_radial(dims, scale, r) ** (p + 1.0)
    hole = quad.integrate_volume(f, dims.N, 0.0, tower.cfg.epsilon)
    outside = quad.integrate_volume(f, dims.N, tower.cfg.outer)
    return hole + outside


def tower_energy(cfg: Union[TowerConfig, BubbleTower], quad: QuadratureEngine) -> TowerEnergy:
    """
    J_ε(V) = ½ΣΣ s_is_j ∫U_i^p PU_j - (1/(p+1))∫|V|^{p+1}

    The excess J - k·J∞ is assembled from defect integrals so that its small
    leading term is not lost against the bubble energies.
    """
    tower = _as_tower(cfg)
    dims = tower.dims
    p = dims.p_value
    k = tower.k
    consts = closed_form_constants(dims)
    bubble_energy = 2.0 / dims.N * alpha_n(dims.N) ** (p + 1.0) * consts["c1"]

    bilinear = np.zeros((k, k))
    error = 0.0
    for i in range(k):
        for j in range(k):
            result = bilinear_form(tower, i, j, quad)
            bilinear[i, j] = result.value
            error += result.error_estimate
    signs = tower.signs
    quadratic = 0.5 * float(signs @ bilinear @ signs)

    def potential_integrand(r: float) -> float:
        return float(np.abs(tower.value(r)) ** (p + 1.0))

    potential_result = tower.integrate(potential_integrand, quad)
    potential = potential_result.value / (p + 1.0)
    error += potential_result.error_estimate

    # excess = Σ_i ½∫U_i^p d_i + Σ_{i<j} s_is_jB_ij - (1/(p+1))∫(|V|^{p+1} - ΣU_i^{p+1})
    #          - (½ - 1/(p+1)) Σ_i ∫_outside U_i^{p+1}
    def diagonal_defects(r: float) -> float:
        return float(sum(0.5 * tower.bubble(i, r) ** p * tower.defect(i, r) for i in range(k)))

    def potential_excess(r: float) -> float:
        if k == 1:
            return float(_power_offset(tower.bubble(0, r), tower.defect(0, r), p + 1.0))
        bubbles = sum(tower.bubble(i, r) ** (p + 1.0) for i in range(k))
        return float(np.abs(tower.value(r)) ** (p + 1.0) - bubbles)

    excess = tower.integrate(diagonal_defects, quad).value
    excess += sum(signs[i] * signs[j] * bilinear[i, j] for i in range(k) for j in range(i + 1, k))
    excess -= tower.integrate(potential_excess, quad).value / (p + 1.0)
    outside = sum(_outside_energy(tower, i, quad).value for i in range(k))
    excess -= (0.5 - 1.0 / (p + 1.0)) * outside

    return TowerEnergy(
        value=quadratic - potential,
        excess=excess,
        quadratic=quadratic,
        potential=potential,
        bubble_energy=bubble_energy,
        bilinear=bilinear,
        error_estimate=error,
    )


def single_bubble_split(cfg: Union[TowerConfig, BubbleTower], quad: QuadratureEngine) -> Dict[str, float]:
    """
    Split of J_ε(PU) - J∞ for one bubble

    robin_piece = ½∫U^p h_Ω, hole_piece = ½∫U^p h_ε and the truncation piece
    (the rest), next to their first-order predictions.
    """
    tower = _as_tower(cfg)
    if tower.k != 1:
        raise DomainError("the single-bubble split needs k = 1")
    dims = tower.dims
    N = dims.N
    p = dims.p_value
    mu = tower.scales[0]
    eps = tower.cfg.epsilon
    projection = tower.projections[0]
    alpha = alpha_n(N)
    consts = closed_form_constants(dims)

    robin = tower.integrate(lambda r: 0.5 * tower.bubble(0, r) ** p * projection.ball_correction(r), quad)
    hole = tower.integrate(lambda r: 0.5 * tower.bubble(0, r) ** p * projection.hole_correction(r), quad)
    excess = tower_energy(tower, quad).excess

    robin_target = 0.5 * alpha ** (p + 1.0) * consts["c2"] * robin_function(N, tower.cfg.outer) * mu ** (N - 4)
    u0_lap0 = -N * (N - 4) * alpha ** 2
    hole_first_order = -(N - 2) * sphere_measure(N) * u0_lap0 * (eps / mu) ** (N - 2)
    hole_printed = 0.5 * alpha ** (p + 1.0) * consts["c3"] * u0_lap0 * (eps / mu) ** (N - 2)

    return {
        "excess": excess,
        "robin_piece": robin.value,
        "hole_piece": hole.value,
        "truncation_piece": excess - robin.value - hole.value,
        "robin_target": robin_target,
        "hole_first_order": hole_first_order,
        "hole_printed": hole_printed,
        "truncation_scale": mu ** N + (eps / mu) ** N,
    }
