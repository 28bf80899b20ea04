"""
Campaign Application Launcher
Runs the full verification campaign from the config file and writes the report bundle

Usage: Run from project root directory
    python scripts/campaign_app.py
    python scripts/campaign_app.py residual
"""

import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import VerificationError
from src.experiments import ExperimentEngine, emit_report
from src.run_config import load_run_config


def run_campaign(only: str = None) -> int:
    """
    Run the configured campaign

    Args:
        only: Substring filter on experiment names

    Returns:
        int: 0 when every experiment passed, 1 otherwise
    """
    print("\n" + "=" * 70)
    print("🔬 BUBBLE TOWER - VERIFICATION CAMPAIGN")
    print("=" * 70)

    config = load_run_config()
    print(f"\n⚙️  Campaign Configuration:")
    print(f"   Dimension: N={config.N}, k={config.k}")
    print(f"   Sweep: eps in [{config.eps_min:g}, {config.eps_max:g}], {config.eps_samples} points")
    print(f"   Quadrature: abs_tol={config.abs_tol:g}, rel_tol={config.rel_tol:g}")

    engine = ExperimentEngine(config)
    reports = engine.run(only=only)
    for report in reports:
        report.print_summary()
    emit_report(reports, config.output_dir)

    failed = [r.name for r in reports if not r.passed]
    print("\n" + "=" * 70)
    if failed:
        print(f"❌ {len(failed)} experiment(s) failed: {', '.join(failed)}")
    else:
        print("✅ Campaign Complete! All experiments passed")
    print("=" * 70)
    return 1 if failed else 0


def main():
    only = sys.argv[1] if len(sys.argv) > 1 else None
    try:
        return run_campaign(only)
    except VerificationError as e:
        print(f"\n❌ Campaign could not start: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
