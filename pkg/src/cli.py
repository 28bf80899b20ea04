"""
Command-line front-end

Usage: Run from project root directory
    python scripts/app.py constants --N 5
    python scripts/app.py critical-point --N 5 --k 2
    python scripts/app.py campaign --only interaction

Exit codes: 0 all checks pass, 1 experiment failure, 2 configuration or
precondition error, 3 solver failure.
"""

import argparse
import sys
import time
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.constants import closed_form_constants, energy_constants, make_dims
from src.errors import (ConfigError, DomainError, NewtonError, QuadratureError, RegimeError,
                        ScaleOrderingError, SingularDerivativeError, VerificationError)
from src.experiments.experiment_engine import ExperimentEngine
from src.experiments.experiment_result import ExperimentReport, emit_report
from src.experiments.experiment_suite import (energy_expansion_experiment,
                                              interaction_integral_experiment,
                                              residual_experiment)
from src.radial_solver import (RadialGrid, expansion_decompose, project_bubble,
                               robin_coefficients, robin_function)
from src.bubble import bubble_radial
from src.reduced_energy import (GammaKernel, ReducedEnergy, find_critical_point, sigma_hessian_certificate,
                                unit_start)
from src.run_config import RunConfig, load_run_config
from src.run_logger import RunLogger

SUPPORTED_N = range(5, 13)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PRECONDITION = 2
EXIT_SOLVER = 3


def _check_n(N: int):
    if N not in SUPPORTED_N:
        raise DomainError(f"N must be in {SUPPORTED_N.start}..{SUPPORTED_N.stop - 1}, got {N}")


def _config_from_args(args) -> RunConfig:
    """Configuration file (or defaults) with the command-line flags applied"""
    config = load_run_config(args.config) if getattr(args, "config", None) else RunConfig()
    return config.with_overrides(
        N=getattr(args, "N", None),
        k=getattr(args, "k", None),
        eps_min=getattr(args, "eps_min", None),
        eps_max=getattr(args, "eps_max", None),
        eps_samples=getattr(args, "eps_samples", None),
        grid_nodes=getattr(args, "grid_nodes", None),
        rel_tol=getattr(args, "tol", None),
        output_dir=getattr(args, "out", None) if args.command == "campaign" else None,
    )


def _print_table(title: str, rows: List[Dict]):
    print("\n" + "=" * 70)
    print(f"📊 {title}")
    print("=" * 70)
    for row in rows:
        target = row.get("target")
        line = f"   {row['quantity']:<18} {row['value']:>16.6e}"
        if row.get("error_estimate") is not None:
            line += f"  ± {row['error_estimate']:.1e}"
        if target is not None and not (isinstance(target, float) and np.isnan(target)):
            line += f"  target {target:.6e}"
        print(line)
    print("=" * 70)


def _write_csv(rows: List[Dict], path: str):
    pd.DataFrame(rows).to_csv(path, index=False, float_format="%.16e")
    print(f"💾 CSV saved to: {path}")


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_constants(args) -> Dict:
    """Energy constants, Γ(0) and H(0,0) with error estimates and closed-form targets"""
    _check_n(args.N)
    dims = make_dims(args.N, 1)
    config = _config_from_args(args)
    quad = config.quadrature()
    closed = closed_form_constants(dims)
    consts = energy_constants(dims, quad)
    gamma0 = GammaKernel(dims, quad).evaluate(0.0)

    rows = [
        {"quantity": "alpha_N", "value": consts.alpha_N, "error_estimate": 0.0, "target": closed["alpha_N"]},
        {"quantity": "c1", "value": consts.c1, "error_estimate": consts.c1_error, "target": closed["c1"]},
        {"quantity": "c2", "value": consts.c2, "error_estimate": consts.c2_error, "target": closed["c2"]},
        {"quantity": "c3", "value": consts.c3, "error_estimate": 0.0, "target": closed["c3"]},
        {"quantity": "gamma0", "value": gamma0.value, "error_estimate": gamma0.error_estimate,
         "target": closed["c2"]},
        {"quantity": "robin_H00", "value": robin_function(args.N), "error_estimate": 0.0,
         "target": 2.0 * (args.N - 2) / args.N},
    ]
    _print_table(f"ENERGY CONSTANTS (N={args.N})", rows)
    if args.csv:
        _write_csv(rows, args.csv)
    return {"status": EXIT_OK, "headline": {"c1": consts.c1, "c2": consts.c2}}


def cmd_critical_point(args) -> Dict:
    """Newton critical point of Φ at σ = 0 with its certificate"""
    config = _config_from_args(args)
    dims = make_dims(config.N, config.k)
    quad = config.quadrature()
    energy = ReducedEnergy.build(dims, quad, config.radius)
    cert = find_critical_point(energy, init=unit_start(config.N, config.k, config.d))
    sigma = sigma_hessian_certificate(dims, gamma=energy.gamma)
    sigma_ok, sigma_reason = sigma.check()

    print("\n" + "=" * 70)
    print(f"🎯 CRITICAL POINT CERTIFICATE (N={config.N}, k={config.k})")
    print("=" * 70)
    print(f"   mu:                 {', '.join(f'{m:.6f}' for m in cert.point.mu)}")
    print(f"   lambda:             {cert.lam:>14.6e}")
    print(f"   Newton iterations:  {cert.iterations:>14}")
    print(f"   |grad Phi|:         {cert.grad_norm:>14.3e}")
    print(f"   chain residual:     {cert.chain_residual:>14.3e}")
    print(f"   det(Q):             {cert.det_q:>14.6e}")
    print(f"   det target:         {cert.det_target:>14.6e}")
    print(f"   det(Q)/lambda^k:    {cert.det_q / cert.lam ** config.k:>14.6f}")
    print(f"   off-block max:      {cert.off_block_max:>14.3e}")
    print(f"   sigma diagonals:    {', '.join(f'{v:.6e}' for v in np.unique(np.round(cert.sigma_diagonals, 12)))}")
    print(f"   U-product Hessian:  {np.diag(sigma.hessian)[0]:>14.6e} (target {sigma.target:.6e}, "
          f"printed {sigma.printed_target:.6e})")
    print(f"   g-block Hessian:    {np.diag(sigma.g_hessian)[0]:>14.6e} (curvature integral "
          f"{sigma.g_curvature_oracle:.6e})")
    print("\n🧪 Checks:")
    for name, ok, detail in cert.checks():
        print(f"   {'✅' if ok else '❌'} {name:<18} {detail}")
    print(f"   {'✅' if sigma_ok else '❌'} {'sigma Hessian':<18} {sigma_reason or 'product rule and g-block'}")
    print("=" * 70)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(cert.to_record())
        print(f"💾 Certificate saved to: {args.out}")
    return {"status": EXIT_OK if cert.passed and sigma_ok else EXIT_FAILED,
            "headline": {"mu": [float(m) for m in cert.point.mu], "lambda": cert.lam,
                         "sigma_hessian_ok": sigma_ok, "newton_iterations": cert.iterations}}


def cmd_project(args) -> Dict:
    """P_εU_{μ,0} on a log-graded grid with its expansion pieces"""
    config = _config_from_args(args)
    dims = make_dims(config.N, 1)
    eps = args.eps if args.eps is not None else config.eps_max
    grid = RadialGrid.log_graded(config.N, eps, config.grid_nodes, config.radius, focus_scales=(args.mu,))
    field = project_bubble(dims, args.mu, grid, config.quadrature(), method=args.method)
    bubble = bubble_radial(dims, args.mu, grid.nodes)

    rows = [
        {"quantity": "sup_PU", "value": field.sup_norm(), "error_estimate": field.error_estimate},
        {"quantity": "sup_U", "value": float(np.max(bubble))},
        {"quantity": "sup_defect", "value": float(np.max(np.abs(field.values - bubble)))},
    ]
    try:
        expansion = expansion_decompose(dims, args.mu, grid)
        rows += [
            {"quantity": "a1", "value": expansion.a1},
            {"quantity": "a2", "value": expansion.a2},
            {"quantity": "sup_hole_remainder", "value": expansion.hole_remainder.sup_norm()},
            {"quantity": "envelope_ratio", "value": expansion.envelope_ratio()},
        ]
    except RegimeError as exc:
        print(f"⚠️ Expansion skipped: {exc}")
    _print_table(f"PROJECTION (N={config.N}, mu={args.mu:g}, eps={eps:g}, {args.method})", rows)

    if args.csv:
        frame = field.to_frame()
        frame["U"] = bubble
        frame["defect"] = field.values - bubble
        frame.to_csv(args.csv, index=False, float_format="%.16e")
        print(f"💾 CSV saved to: {args.csv}")
    return {"status": EXIT_OK, "headline": {"sup_PU": field.sup_norm()}}


def cmd_robin(args) -> Dict:
    """Robin function H(x,0) = a + b|x|² of the ball"""
    _check_n(args.N)
    a, b = robin_coefficients(args.N, args.radius)
    rows = [
        {"quantity": "H00", "value": a, "target": args.radius ** (4 - args.N) * (2 * args.N - 4) / args.N},
        {"quantity": "b", "value": b, "target": (4 - args.N) * args.radius ** (2 - args.N) / args.N},
    ]
    _print_table(f"ROBIN FUNCTION (N={args.N}, R={args.radius:g})", rows)
    if args.csv:
        _write_csv(rows, args.csv)
    return {"status": EXIT_OK, "headline": {"H00": a}}


def _run_sweep(args, routine, **extra) -> Dict:
    config = _config_from_args(args)
    kwargs = dict(N=config.N, k=config.k, eps_min=config.eps_min, eps_max=config.eps_max,
                  eps_samples=config.eps_samples, quad=config.quadrature(), radius=config.radius)
    kwargs.update(extra)
    start = time.perf_counter()
    report: ExperimentReport = routine(**kwargs)
    report.duration = time.perf_counter() - start
    report.print_summary()
    if args.csv:
        report.samples().to_csv(args.csv, index=False, float_format="%.16e")
        print(f"💾 CSV saved to: {args.csv}")
    return {"status": EXIT_OK if report.passed else EXIT_FAILED,
            "headline": {"checks": len(report.checks), "passed": report.passed}}


def cmd_energy_sweep(args) -> Dict:
    return _run_sweep(args, energy_expansion_experiment)


def cmd_residual_sweep(args) -> Dict:
    return _run_sweep(args, residual_experiment, grid_nodes=_config_from_args(args).grid_nodes)


def cmd_interactions(args) -> Dict:
    if args.k is None:
        args.k = 2
    return _run_sweep(args, interaction_integral_experiment)


def cmd_campaign(args) -> Dict:
    """Run the configured experiments and write the report bundle"""
    config = _config_from_args(args)
    engine = ExperimentEngine(config)
    reports = engine.run(only=args.only)
    for report in reports:
        report.print_summary()
    bundle = emit_report(reports, config.output_dir)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"\n❌ Failed experiments: {', '.join(failed)}")
    return {"status": EXIT_FAILED if failed else EXIT_OK,
            "headline": {"bundle": bundle, "experiments": len(reports), "failed": failed}}


COMMANDS = {
    "constants": cmd_constants,
    "critical-point": cmd_critical_point,
    "project": cmd_project,
    "energy-sweep": cmd_energy_sweep,
    "residual-sweep": cmd_residual_sweep,
    "interactions": cmd_interactions,
    "robin": cmd_robin,
    "campaign": cmd_campaign,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bubble-tower",
        description="Numerical checks for sign-changing bubble towers of the biharmonic problem on a punctured ball",
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    def common(sub, n_default: Optional[int] = None, with_k: bool = True):
        sub.add_argument("--config", type=str, help="Path to a campaign config JSON file")
        sub.add_argument("--N", type=int, default=n_default, help="Space dimension (5..12)")
        if with_k:
            sub.add_argument("--k", type=int, help="Number of bubbles")
        sub.add_argument("--tol", type=float, help="Relative quadrature tolerance")
        sub.add_argument("--csv", type=str, help="Write the table or sweep samples to this CSV file")

    def sweep(sub):
        sub.add_argument("--eps-min", type=float, help="Smallest hole radius of the sweep")
        sub.add_argument("--eps-max", type=float, help="Largest hole radius of the sweep")
        sub.add_argument("--eps-samples", type=int, help="Number of sweep points")

    constants_parser = subparsers.add_parser("constants", help="Energy constants, Gamma(0) and H(0,0)")
    common(constants_parser, n_default=5, with_k=False)

    critical_parser = subparsers.add_parser("critical-point", help="Certified critical point of Phi")
    common(critical_parser)
    critical_parser.add_argument("--out", type=str, help="Write the certificate record to this file")

    project_parser = subparsers.add_parser("project", help="Navier projection of one bubble")
    common(project_parser, with_k=False)
    project_parser.add_argument("--mu", type=float, default=0.5, help="Bubble scale")
    project_parser.add_argument("--eps", type=float, help="Hole radius")
    project_parser.add_argument("--grid-nodes", type=int, help="Base grid size")
    project_parser.add_argument("--method", choices=["exact", "quadrature"], default="exact")

    energy_parser = subparsers.add_parser("energy-sweep", help="Energy expansion along an eps-sweep")
    common(energy_parser)
    sweep(energy_parser)

    residual_parser = subparsers.add_parser("residual-sweep", help="W1/W2 residual norms along an eps-sweep")
    common(residual_parser)
    sweep(residual_parser)
    residual_parser.add_argument("--grid-nodes", type=int, help="Base grid size")

    interactions_parser = subparsers.add_parser("interactions", help="Annulus interaction integrals")
    common(interactions_parser)
    sweep(interactions_parser)

    robin_parser = subparsers.add_parser("robin", help="Robin function of the ball")
    common(robin_parser, n_default=5, with_k=False)
    robin_parser.add_argument("--radius", type=float, default=1.0, help="Ball radius")

    campaign_parser = subparsers.add_parser("campaign", help="Run the configured experiment campaign")
    common(campaign_parser)
    sweep(campaign_parser)
    campaign_parser.add_argument("--grid-nodes", type=int, help="Base grid size")
    campaign_parser.add_argument("--only", type=str, help="Run only experiments whose name contains this")
    campaign_parser.add_argument("--out", type=str, help="Parent directory of the report bundle")
    return parser


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the process exit code"""
    if isinstance(exc, (DomainError, ConfigError, RegimeError, ScaleOrderingError, SingularDerivativeError)):
        return EXIT_PRECONDITION
    if isinstance(exc, (NewtonError, QuadratureError)):
        return EXIT_SOLVER
    if isinstance(exc, VerificationError):
        return EXIT_SOLVER
    return EXIT_FAILED


def main(argv: Optional[List[str]] = None, logger: Optional[RunLogger] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_PRECONDITION

    start = time.perf_counter()
    headline: Dict = {}
    message = ""
    try:
        outcome = COMMANDS[args.command](args)
        status = outcome["status"]
        headline = outcome.get("headline", {})
    except VerificationError as exc:
        status = exit_code_for(exc)
        message = f"{type(exc).__name__}: {exc}"
        print(f"❌ {message}", file=sys.stderr)
        if isinstance(exc, NewtonError):
            print(f"   iterations={exc.iterations} grad_norm={exc.grad_norm}", file=sys.stderr)

    logger = logger or RunLogger()
    parameters = {key: value for key, value in vars(args).items() if key != "command"}
    logger.log_run(args.command, parameters, status, time.perf_counter() - start, headline, message)
    return status


if __name__ == "__main__":
    sys.exit(main())
