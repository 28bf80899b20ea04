"""
Experiment Suite
Verification routines run by the campaign; each returns an ExperimentReport
"""

import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from src.bubble import bubble_radial, verify_entire_equation
from src.constants import (alpha_n, closed_form_constants, energy_constants, make_dims,
                           sphere_measure)
from src.errors import DomainError
from src.experiments.experiment_result import ExperimentReport, fixed_slope_constant, rate_fit
from src.quadrature import QuadratureEngine
from src.radial_solver import (RadialGrid, expansion_decompose, navier_projection,
                               pz_inner_products, robin_function)
from src.reduced_energy import (DEFAULT_BOX, BLOCK_TOL, CHAIN_TOL, G_ORACLE_TOL, GRAD_TOL, GammaKernel,
                                ReducedEnergy, ReducedPoint, coercivity_scan, f_at_origin,
                                find_critical_point, q_determinant_target, q_matrix,
                                sigma_hessian_certificate, tridiagonal_determinant, unit_start)
from src.tower import (BubbleTower, assemble_tower, count_sign_changes, f_prime_comparison,
                       outer_sup, residual_w1, residual_w2, single_bubble_split,
                       tower_energy, tower_scales)


def eps_sweep(eps_min: float, eps_max: float, samples: int) -> np.ndarray:
    """Geometric sweep from eps_max down to eps_min"""
    if not 0.0 < eps_min < eps_max or samples < 4:
        raise DomainError(f"need 0 < eps_min < eps_max and >= 4 samples, got ({eps_min}, {eps_max}, {samples})")
    return np.geomspace(eps_max, eps_min, samples)


def balance_point(N: int, k: int, quad: QuadratureEngine, radius: float = 1.0,
                  d: float = DEFAULT_BOX) -> Tuple[ReducedEnergy, ReducedPoint]:
    """Reduced energy and its σ = 0 critical point from the closed-form balance chain"""
    energy = ReducedEnergy.build(make_dims(N, k), quad, radius)
    return energy, ReducedPoint.at_origin(energy.balance_chain(k).mu, N, d)


def _quad(quad: Optional[QuadratureEngine]) -> QuadratureEngine:
    return quad if quad is not None else QuadratureEngine()


# ----------------------------------------------------------------------
# Constants and certificates
# ----------------------------------------------------------------------

def constants_experiment(N: int = 5, quad: Optional[QuadratureEngine] = None,
                         robin_dimensions: Sequence[int] = (5, 6, 7, 8),
                         gamma_far: float = 50.0) -> ExperimentReport:
    """Energy constants, Γ(0), |S^{N-1}|, Robin function and the entire equation"""
    quad = _quad(quad)
    dims = make_dims(N, 1)
    report = ExperimentReport("constants", {"N": N})

    closed = closed_form_constants(dims)
    consts = energy_constants(dims, quad)
    for name, value, error in (("c1", consts.c1, consts.c1_error), ("c2", consts.c2, consts.c2_error)):
        report.add_sample(0.0, name, value, error)
        report.add_check(name, value, closed[name], 1e-8, "Beta-integral closed form")

    gamma = GammaKernel(dims, quad)
    g0 = gamma.evaluate(0.0)
    report.add_sample(0.0, "gamma0", g0.value, g0.error_estimate)
    report.add_check("gamma(0)", g0.value, 0.5 * sphere_measure(N) * special.beta(2.0, N / 2.0),
                     1e-8, "interaction kernel at the origin")

    # Gaussian integral: |S^{N-1}| ∫ r^{N-1}e^{-r²} dr = π^{N/2}
    moment = quad.integrate_radial(lambda r: r ** (N - 1) * math.exp(-r * r), 0.0, math.inf)
    measure = math.pi ** (N / 2.0) / moment.value
    report.add_sample(0.0, "sphere_measure", measure, measure * moment.error_estimate / moment.value)
    report.add_check("sphere measure", measure, sphere_measure(N), 1e-8, "unit sphere surface")

    for n in robin_dimensions:
        value = robin_function(n)
        report.add_sample(float(n), "robin", value)
        report.add_check(f"robin H(0,0) N={n}", value, 2.0 * (n - 2) / n, 1e-6,
                         "Robin function of the unit ball")

    residual = verify_entire_equation(dims)
    report.add_check("entire equation residual", residual, 1e-10, 0.0,
                     "bubble solves the entire equation", "maximum")
    report.add_check("entire equation residual (FD)", verify_entire_equation(dims, method="finite_difference"),
                     1e-5, 0.0, "bubble solves the entire equation", "info")

    far_quad = quad.with_tolerances(rel_tol=max(quad.rel_tol, 1e-9))
    far = GammaKernel(dims, far_quad).evaluate(gamma_far)
    report.add_sample(gamma_far, "gamma", far.value, far.error_estimate)
    report.add_check(f"gamma decay a^(N-4)G(a) at a={gamma_far:g}", gamma_far ** (N - 4) * far.value,
                     closed["c2"], 0.02, "interaction kernel decay")

    samples = [0.0, 0.5, 1.0, 2.0, 5.0]
    values = [gamma.evaluate(a).value for a in samples]
    for a, v in zip(samples, values):
        report.add_sample(a, "gamma", v)
    violations = int(np.count_nonzero(np.diff(values) >= 0))
    report.add_check("gamma monotone violations", violations, 0.0, 0.0,
                     "interaction kernel decreases", "maximum")
    return report


def determinant_table(Ns: Sequence[int] = range(5, 10), ks: Sequence[int] = range(1, 5),
                      lam: float = 1.7, g0: float = 3.0) -> Dict[Tuple[int, int], Tuple[float, float, float]]:
    """(recursion, closed form, full LU) determinants of Q over a grid of (N, k)"""
    table = {}
    for N in Ns:
        for k in ks:
            Q = q_matrix(N, k, lam, g0)
            recursion = tridiagonal_determinant(np.diag(Q), np.diag(Q, 1), np.diag(Q, -1))
            table[(N, k)] = (recursion, q_determinant_target(N, k, lam), float(np.linalg.det(Q)))
    return table


def certificate_experiment(N: int = 5, k: int = 1, quad: Optional[QuadratureEngine] = None,
                           d: float = DEFAULT_BOX, radius: float = 1.0,
                           sigma_dimensions: Sequence[int] = (5, 6, 7)) -> ExperimentReport:
    """Newton critical point of Φ at σ = 0, its Q-matrix, σ-Hessian and determinant table"""
    quad = _quad(quad)
    dims = make_dims(N, k)
    report = ExperimentReport(f"certificate_k{k}", {"N": N, "k": k, "d": d, "radius": radius})

    energy = ReducedEnergy.build(dims, quad, radius)
    start = unit_start(N, k, d)
    cert = find_critical_point(energy, init=start)
    for i, mu in enumerate(cert.point.mu, start=1):
        report.add_sample(float(i), "mu", mu)
    report.add_sample(0.0, "lambda", cert.lam)
    provenance = "nondegenerate critical point of the reduced energy"

    report.add_check("Newton iterations", cert.iterations, 1, 0.0,
                     "Newton from mu = 1, independent of the closed-form chain", "minimum")

    report.add_check("gradient norm", cert.grad_norm, GRAD_TOL, 0.0, provenance, "maximum")
    report.add_check("balance chain residual", cert.chain_residual, CHAIN_TOL, 0.0, provenance, "maximum")
    report.add_check("det Q relative error", cert.det_relative_error, 1e-8, 0.0,
                     "determinant of the limit matrix", "maximum")
    report.add_check("off-block Hessian max", cert.off_block_max, BLOCK_TOL, 0.0, provenance, "maximum")
    report.add_check("det Q / lambda^k", cert.det_q / cert.lam ** k, (4 * N * k - 8 * k - 4) / (N - 4),
                     1e-8, "determinant of the limit matrix")
    report.add_check("scaled det Hess_nu", cert.scaled_det_hess_nu, cert.det_q, 1e-6,
                     "limit matrix equals diag(nu^2) Hess_nu", "info")

    chain = energy.balance_chain(k)
    report.add_check("mu vs closed-form chain", float(np.max(np.abs(cert.point.mu / chain.mu - 1.0))),
                     1e-8, 0.0, "closed-form balance chain", "maximum")
    if k == 1:
        q = energy.q
        H1 = closed_form_constants(dims)["c2"] * 2.0 * (N - 2) / N * radius ** (4 - N)
        target = q * f_at_origin(dims) / (2.0 * H1)
        report.add_check("nu^(q+2)", cert.nu[0] ** (q + 2.0), target, 1e-10,
                         "closed-form single-bubble minimizer")

    boundary_min, interior = coercivity_scan(energy, k, d)
    report.add_check("boundary/interior energy", boundary_min / interior, 1.0, 0.0,
                     "reduced energy is coercive on the box", "minimum")

    for n in sorted(set(sigma_dimensions) | {N}):
        sigma = sigma_hessian_certificate(make_dims(n, 1))
        report.add_check(f"sigma Hessian diagonal error N={n}", sigma.diagonal_error, 1e-6, 0.0,
                         "product rule at the origin", "maximum")
        report.add_check(f"sigma Hessian off-diagonal N={n}", sigma.max_off_diagonal, 1e-8, 0.0,
                         "product rule at the origin", "maximum")
        report.add_check(f"sigma Hessian vs printed form N={n}", float(np.diag(sigma.hessian)[0]),
                         sigma.printed_target, 1e-6, "printed diagonal 2N^2-6N-4", "info")

    g_block = sigma_hessian_certificate(dims, gamma=energy.gamma)
    g_diag = np.diag(g_block.g_hessian)
    g_spread = float(np.max(np.abs(g_block.g_hessian - g_diag[0] * np.eye(N))) / abs(g_diag[0]))
    report.add_sample(0.0, "g_hessian_diagonal", float(g_diag[0]))
    report.add_check("g-block isotropy", g_spread, 1e-6, 0.0,
                     "Hessian of 2Gamma at 0 is a nonzero multiple of the identity", "maximum")
    report.add_check("g-block vs curvature integral", float(g_diag[0]), g_block.g_curvature_oracle,
                     G_ORACLE_TOL, "second derivative of the interaction kernel at 0")
    report.add_check("gamma kernel converged", float(energy.gamma.converged), 1.0, 0.0,
                     "interaction kernel at the engine tolerance", "info",
                     f"max error estimate {energy.gamma.max_error_estimate:.2e}")

    table = determinant_table()
    recursion_err = max(abs(r - t) / abs(t) for r, t, _ in table.values())
    lu_err = max(abs(r - lu) / abs(lu) for r, _, lu in table.values())
    report.add_check("det table recursion vs closed form", recursion_err, 1e-8, 0.0,
                     "determinant of the limit matrix", "maximum")
    report.add_check("det table recursion vs LU", lu_err, 1e-8, 0.0,
                     "determinant of the limit matrix", "maximum")
    return report


# ----------------------------------------------------------------------
# Energy expansion
# ----------------------------------------------------------------------

def energy_expansion_experiment(N: int = 5, k: int = 1, eps_min: float = 1e-6, eps_max: float = 1e-3,
                                eps_samples: int = 7, quad: Optional[QuadratureEngine] = None,
                                mu: Optional[Sequence[float]] = None,
                                radius: float = 1.0) -> ExperimentReport:
    """
    J_ε(V) - k·J∞ along an ε-sweep at the critical scales

    Fits the rate (N-4)θ/(2k) and the leading coefficient (α^{p+1}/2)Φ(μ̂, 0);
    for one bubble the Robin, hole and truncation pieces are gated separately.
    """
    quad = _quad(quad)
    dims = make_dims(N, k)
    energy, point = balance_point(N, k, quad, radius)
    if mu is not None:
        point = ReducedPoint.at_origin(mu, N, point.d)
    rate = float(dims.energy_rate)
    report = ExperimentReport(f"energy_k{k}", {
        "N": N, "k": k, "eps_min": eps_min, "eps_max": eps_max, "eps_samples": eps_samples,
        "mu": ",".join(f"{m:.10g}" for m in point.mu),
    })

    splits = []
    for eps in eps_sweep(eps_min, eps_max, eps_samples):
        tower = BubbleTower(tower_scales(dims, eps, point.mu, radius))
        result = tower_energy(tower, quad)
        report.add_sample(eps, "energy", result.value, result.error_estimate)
        report.add_sample(eps, "excess", result.excess, result.error_estimate)
        if k == 1:
            split = single_bubble_split(tower, quad)
            for key in ("robin_piece", "hole_piece", "truncation_piece"):
                report.add_sample(eps, key, split[key])
            splits.append(split)
        else:
            report.add_sample(eps, "cross_term", abs(result.bilinear[0, 1]))
            report.add_sample(eps, "cross_asymmetry",
                              abs(result.bilinear[0, 1] - result.bilinear[1, 0]) / abs(result.bilinear[0, 1]))

    excess = report.series("excess")
    non_positive = sum(1 for _, v in excess if v <= 0.0)
    report.add_check("energy excess sign", non_positive, 0, 0.0,
                     "energy excess is positive in the asymptotic regime", "maximum",
                     f"{non_positive} of {len(excess)} samples <= 0")
    if non_positive:
        report.warn(f"energy excess changes sign along the sweep ({non_positive} of {len(excess)} samples <= 0), "
                    "rate and coefficient not fitted")
    else:
        fit = rate_fit(excess)
        report.add_rate_check("energy excess", fit, rate, 0.10, "energy expansion leading order")

        tail = excess[len(excess) // 2:]
        coefficient = fixed_slope_constant(tail, rate)
        target = 0.5 * alpha_n(N) ** (dims.p_value + 1.0) * energy.phi_value(point)
        report.add_check("energy coefficient", coefficient, target, 0.20,
                         "energy expansion leading coefficient", "relative" if k == 1 else "info")

    if k == 1:
        last = splits[-1]
        report.add_check("robin piece", last["robin_piece"], last["robin_target"], 0.05,
                         "Robin part of the single-bubble expansion")
        report.add_check("hole piece", last["hole_piece"], last["hole_first_order"], 0.10,
                         "hole part of the single-bubble expansion (first order)")
        report.add_check("hole piece vs printed form", last["hole_piece"], last["hole_printed"], 0.10,
                         "hole part of the single-bubble expansion (printed)", "info")
        truncation = [(e, abs(v)) for e, v in report.series("truncation_piece")]
        bound = min(N * dims.theta_value / 2.0, N * (1.0 - dims.theta_value / 2.0))
        report.add_rate_check("truncation piece", rate_fit(truncation), bound, 0.15,
                              "truncation of the single-bubble expansion", "minimum")
    else:
        report.add_rate_check("cross term", rate_fit(report.series("cross_term")), rate, 0.15,
                              "bubble interaction in the energy")
        asymmetry = max(v for _, v in report.series("cross_asymmetry"))
        report.add_check("bilinear form asymmetry", asymmetry, 1e-8, 0.0,
                         "symmetry of the Navier bilinear form", "maximum")
    return report


# ----------------------------------------------------------------------
# Projection defect and remainder
# ----------------------------------------------------------------------

def defect_exponent(N: int, path_exponent: float) -> float:
    """Predicted μ-slope of ∫U^{p-1}(P_εU-U)² along ε = μ^path_exponent"""
    if N < 8:
        bulk = 2.0 * (N - 4)
    elif N == 8:
        bulk = 8.0
    else:
        bulk = float(N)
    return min(bulk, (path_exponent - 1.0) * N)


def projection_defect_experiment(N: int = 5, mu_min: float = 0.005, mu_max: float = 0.1,
                                 mu_samples: int = 7, path_exponent: float = 3.0,
                                 quad: Optional[QuadratureEngine] = None,
                                 radius: float = 1.0) -> ExperimentReport:
    """∫U^{p-1}(P_εU-U)² along the path ε = μ^path_exponent"""
    quad = _quad(quad)
    dims = make_dims(N, 1)
    p = dims.p_value
    report = ExperimentReport("projection_defect", {
        "N": N, "mu_min": mu_min, "mu_max": mu_max, "mu_samples": mu_samples,
        "path_exponent": path_exponent,
    })

    for mu in eps_sweep(mu_min, mu_max, mu_samples):
        eps = mu ** path_exponent
        projection = navier_projection(dims, mu, eps, radius)
        result = quad.integrate_annulus(
            lambda r: bubble_radial(dims, mu, r) ** (p - 1.0) * projection.defect(r) ** 2,
            N, eps, radius, (mu, 10.0 * eps))
        report.add_sample(mu, "defect", result.value, result.error_estimate)

    series = report.series("defect")
    target = defect_exponent(N, path_exponent)
    provenance = "projection defect bound"
    if N == 8:
        plain = rate_fit(series)
        corrected = rate_fit(series, log_power=1.0)
        report.add_rate_check("defect (log-corrected)", corrected, target, 0.15, provenance)
        report.add_check("log correction improves fit", plain.residual - corrected.residual, 0.0, 0.0,
                         provenance, "minimum")
    else:
        report.add_rate_check("defect", rate_fit(series), target, 0.15, provenance)
    report.add_check("printed hole exponent along path", 2.0 * (N - 2) * (path_exponent - 1.0),
                     target, 0.0, "printed hole term of the defect bound", "info")
    return report


def _hole_remainder_at(dims, mu: float, eps: float, r: float, grid_nodes: int,
                       radius: float) -> Tuple[float, float, float]:
    grid = RadialGrid.log_graded(dims.N, eps, grid_nodes, radius, focus_scales=(mu,))
    expansion = expansion_decompose(dims, mu, grid)
    return (float(expansion.hole_correction.value(r)), float(expansion.remainder(r)),
            expansion.envelope_ratio())


def projection_remainder_experiment(N: int = 5, mu: float = 0.5, r_fixed: float = 0.3,
                                    eps_min: float = 1e-4, eps_max: float = 1e-2, eps_samples: int = 7,
                                    grid_nodes: int = 512, mu_step: float = 1e-3,
                                    radius: float = 1.0) -> ExperimentReport:
    """
    Remainder of the projection expansion at a fixed interior radius

    The ε-rate is measured on the hole remainder (decays like ε^N); the literal
    remainder carries the ε-independent outer defect and is informational.
    """
    dims = make_dims(N, 1)
    report = ExperimentReport("projection_remainder", {
        "N": N, "mu": mu, "r_fixed": r_fixed, "eps_min": eps_min, "eps_max": eps_max,
        "eps_samples": eps_samples, "grid_nodes": grid_nodes,
    })
    delta = mu_step * mu
    ratios = []
    for eps in eps_sweep(eps_min, eps_max, eps_samples):
        hole, literal, ratio = _hole_remainder_at(dims, mu, eps, r_fixed, grid_nodes, radius)
        plus = _hole_remainder_at(dims, mu + delta, eps, r_fixed, grid_nodes, radius)[0]
        minus = _hole_remainder_at(dims, mu - delta, eps, r_fixed, grid_nodes, radius)[0]
        derivative = (plus - minus) / (2.0 * delta)
        report.add_sample(eps, "hole_remainder", abs(hole))
        report.add_sample(eps, "literal_remainder", abs(literal))
        report.add_sample(eps, "envelope_ratio", ratio)
        report.add_sample(eps, "mu_derivative", abs(derivative) * mu ** ((N + 4) / 2.0))
        ratios.append(ratio)

    provenance = "remainder of the projection expansion"
    report.add_rate_check("hole remainder", rate_fit(report.series("hole_remainder")),
                          N - 1.0, 0.15, provenance, "minimum")
    report.add_rate_check("mu-derivative remainder", rate_fit(report.series("mu_derivative")),
                          N - 1.0, 0.15, provenance, "minimum")
    report.add_check("envelope ratio growth", max(ratios) / ratios[0], 2.0, 0.0, provenance, "maximum")
    try:
        literal_fit = rate_fit(report.series("literal_remainder"))
        report.add_rate_check("literal remainder", literal_fit, N - 1.0, 0.15, provenance, "info")
    except DomainError as exc:
        report.warn(f"literal remainder not fitted: {exc}")
    return report


# ----------------------------------------------------------------------
# Interactions and residuals
# ----------------------------------------------------------------------

def interaction_integral_experiment(N: int = 5, k: int = 2, eps_min: float = 1e-6, eps_max: float = 1e-3,
                                    eps_samples: int = 7, quad: Optional[QuadratureEngine] = None,
                                    mu: Optional[Sequence[float]] = None,
                                    radius: float = 1.0) -> ExperimentReport:
    """Annulus interaction integrals of consecutive bubbles (closed-form integrands)"""
    if k < 2:
        raise DomainError("interaction integrals need k >= 2")
    quad = _quad(quad)
    dims = make_dims(N, k)
    p = dims.p_value
    beta = float(dims.beta)
    if mu is None:
        mu = balance_point(N, k, quad, radius)[1].mu
    mu = np.asarray(mu, dtype=float)
    report = ExperimentReport("interaction", {
        "N": N, "k": k, "eps_min": eps_min, "eps_max": eps_max, "eps_samples": eps_samples,
        "mu": ",".join(f"{m:.10g}" for m in mu),
    })
    # U2^(p+1) on A1 decays like eps^(Nθ/2k), far below the default absolute tolerance at small eps
    relative_quad = quad.with_tolerances(abs_tol=min(quad.abs_tol, 1e-40))

    for eps in eps_sweep(eps_min, eps_max, eps_samples):
        tower = BubbleTower(tower_scales(dims, eps, mu, radius))
        A1 = tower.decomposition.annulus(1)
        A2 = tower.decomposition.annulus(2)
        U = tower.bubble
        rows = {
            "A1_U1p_U2": tower.integrate(lambda r: U(0, r) ** p * U(1, r), quad, A1),
            "A2_U2p_U1": tower.integrate(lambda r: U(1, r) ** p * U(0, r), quad, A2),
            "A1_U2_p1": tower.integrate(lambda r: U(1, r) ** (p + 1.0), relative_quad, A1),
            "A1_U1p_dPU2": tower.integrate(lambda r: U(0, r) ** p * abs(tower.defect(1, r)), quad, A1),
            "A1_dPU1p_U2": tower.integrate(
                lambda r: abs(tower.projected(0, r) ** p - U(0, r) ** p) * U(1, r), quad, A1),
        }
        mixed = tower.integrate(lambda r: (U(0, r) ** (p - 1.0) * U(1, r)) ** beta, quad, A1)
        for name, result in rows.items():
            report.add_sample(eps, name, result.value, result.error_estimate)
        report.add_sample(eps, "A1_mixed_norm", mixed.value ** (1.0 / beta))

    rate = float(dims.energy_rate)
    gamma0 = GammaKernel(dims, quad).evaluate(0.0).value
    cross = report.series("A1_U1p_U2")
    report.add_rate_check("A1 U1^p U2", rate_fit(cross), rate, 0.15, "interaction of consecutive bubbles")
    eps_last, value_last = cross[-1]
    constant = value_last / eps_last ** rate
    target = alpha_n(N) ** (p + 1.0) * gamma0 * (mu[1] / mu[0]) ** dims.m
    report.add_check("A1 U1^p U2 normalized constant", constant, target, 0.05,
                     "interaction sharp constant")
    report.add_rate_check("A2 U2^p U1", rate_fit(report.series("A2_U2p_U1")), rate, 0.15,
                          "interaction of consecutive bubbles")
    report.add_rate_check("A1 U2^(p+1)", rate_fit(report.series("A1_U2_p1")),
                          N * dims.theta_value / (2.0 * k), 0.15, "bubble mass outside its annulus")
    report.add_rate_check("A1 mixed beta-norm", rate_fit(report.series("A1_mixed_norm")), rate, 0.15,
                          "mixed-norm interaction bound")
    for name in ("A1_U1p_dPU2", "A1_dPU1p_U2"):
        report.add_rate_check(name.replace("_", " "), rate_fit(report.series(name)), 2.0 * rate, 0.15,
                              "cross-projection interaction bound", "minimum")
    return report


def residual_experiment(N: int = 5, k: int = 1, eps_min: float = 1e-6, eps_max: float = 1e-3,
                        eps_samples: int = 7, grid_nodes: int = 512,
                        quad: Optional[QuadratureEngine] = None,
                        mu: Optional[Sequence[float]] = None, radius: float = 1.0) -> ExperimentReport:
    """W1 and W2 residual norms, sign structure and outer size of the tower"""
    quad = _quad(quad)
    dims = make_dims(N, k)
    if mu is None:
        mu = balance_point(N, k, quad, radius)[1].mu
    mu = np.asarray(mu, dtype=float)
    rate = float(dims.energy_rate)
    report = ExperimentReport(f"residual_k{k}", {
        "N": N, "k": k, "eps_min": eps_min, "eps_max": eps_max, "eps_samples": eps_samples,
        "grid_nodes": grid_nodes, "mu": ",".join(f"{m:.10g}" for m in mu),
    })

    sign_errors = 0
    last_w2 = None
    for eps in eps_sweep(eps_min, eps_max, eps_samples):
        cfg = tower_scales(dims, eps, mu, radius)
        tower = BubbleTower(cfg)
        grid = RadialGrid.log_graded(N, eps, grid_nodes, radius, focus_scales=tower.scales)
        field = assemble_tower(tower, grid)
        if not field.resolved:
            report.warn(f"grid does not resolve every scale at eps={eps:.3e}")
        sign_errors = max(sign_errors, abs(count_sign_changes(field) - (k - 1)))

        w1 = residual_w1(tower, quad)
        w2 = residual_w2(tower, quad)
        last_w2 = w2
        report.add_sample(eps, "W1", w1.value, w1.error_estimate)
        report.add_sample(eps, "W2", w2.value, w2.error_estimate)
        report.add_sample(eps, "W21", w2.breakdown["W21"])
        report.add_sample(eps, "W22", w2.breakdown["W22"])
        report.add_sample(eps, "outer_sup", outer_sup(field))
        for i in range(k):
            report.add_sample(eps, f"fprime_U{i + 1}", f_prime_comparison(tower, i, quad).value)
        if k > 1 and w1.breakdown["A1"] > 0:
            report.add_sample(eps, "cross_share_A1", w1.breakdown["cross_A1"] / w1.breakdown["A1"])

    provenance = "residual of the tower ansatz"
    report.add_check("sign changes off by", sign_errors, 0.0, 0.0, "alternating tower", "maximum")
    if k == 1:
        report.add_check("W1 (single bubble)", max(v for _, v in report.series("W1")), 0.0, 0.0,
                         provenance, "maximum")
        report.add_rate_check("W2", rate_fit(report.series("W2")), rate, 0.15, provenance)
    else:
        report.add_rate_check("W1", rate_fit(report.series("W1")), rate, 0.15, provenance)
        report.add_rate_check("W2", rate_fit(report.series("W2")), rate, 0.15, provenance, "info")
        shares = report.series("cross_share_A1")
        if shares:
            # dominance means f(V) - Σf(PU_j) ≈ pU_1^(p-1)U_2 on A1, so the share tends to p^(-β)
            report.add_check("cross share A1 x p^beta", shares[-1][1] * dims.p_value ** float(dims.beta), 1.0, 0.5,
                             "consecutive-bubble cross term dominates W1 on its annulus", "info",
                             f"min share {min(v for _, v in shares):.4f} over the sweep")
    report.add_check("W22/W21 at smallest eps", last_w2.breakdown["W22"] / last_w2.breakdown["W21"],
                     1.0, 0.0, "linear part dominates W2", "maximum")
    report.add_rate_check("outer sup|V|", rate_fit(report.series("outer_sup")),
                          dims.theta_value * dims.m / (2.0 * k), 0.15, "decay of the tower away from the hole",
                          "relative" if k == 1 else "info")
    for i in range(k):
        name = f"fprime_U{i + 1}"
        try:
            report.add_rate_check(name, rate_fit(report.series(name)), rate, 0.15,
                                  "f' comparison norm", "info")
        except DomainError as exc:
            report.warn(f"{name} not fitted: {exc}")
    return report


def pz_scaling_experiment(N: int = 5, eps_min: float = 1e-6, eps_max: float = 1e-3, eps_samples: int = 7,
                          quad: Optional[QuadratureEngine] = None, mu: Optional[float] = None,
                          radius: float = 1.0) -> ExperimentReport:
    """μ²⟨ΔPZ⁰, ΔPZ⁰⟩ along the single-bubble scaling path"""
    quad = _quad(quad)
    dims = make_dims(N, 1)
    if mu is None:
        mu = float(balance_point(N, 1, quad, radius)[1].mu[0])
    report = ExperimentReport("pz_scaling", {"N": N, "mu": f"{mu:.10g}", "eps_min": eps_min,
                                             "eps_max": eps_max, "eps_samples": eps_samples})

    identity = 0.0
    for eps in eps_sweep(eps_min, eps_max, eps_samples):
        scale = mu * eps ** (dims.theta_value / 2.0)
        energy, source = pz_inner_products(dims, scale, eps, quad, radius)
        report.add_sample(eps, "scaled_pz", scale ** 2 * energy.value, scale ** 2 * energy.error_estimate)
        identity = max(identity, abs(energy.value - source.value) / abs(energy.value))

    scaled = [v for _, v in report.series("scaled_pz")]
    provenance = "inner product of projected kernels"
    report.add_check("scaled PZ min", min(scaled), 0.0, 0.0, provenance, "minimum")
    report.add_check("scaled PZ variation", abs(scaled[-1] - scaled[-2]) / abs(scaled[-1]), 0.05, 0.0,
                     provenance, "maximum")
    report.add_check("PZ integration by parts", identity, 1e-6, 0.0, provenance, "maximum")
    return report


EXPERIMENTS: Dict[str, Callable[..., ExperimentReport]] = {
    "constants": constants_experiment,
    "certificate": certificate_experiment,
    "energy_expansion": energy_expansion_experiment,
    "projection_defect": projection_defect_experiment,
    "projection_remainder": projection_remainder_experiment,
    "interaction": interaction_integral_experiment,
    "residual": residual_experiment,
    "pz_scaling": pz_scaling_experiment,
}
