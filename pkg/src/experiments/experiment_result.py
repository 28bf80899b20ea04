"""
Experiment Result Analysis
Rate fits, target checks and the report bundle written after a campaign
"""

import math
import os
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import DomainError

MIN_FIT_POINTS = 4
MIN_R_SQUARED = 0.99
SAMPLE_COLUMNS = ["epsilon", "quantity", "value", "error_estimate"]


@dataclass(frozen=True)
class RateFit:
    """Least-squares line log(value) = slope·log(ε) + intercept"""
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    log_power: float = 0.0
    residual: float = 0.0

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)

    def check(self, target: float, rel_tol: float,
              min_r_squared: float = MIN_R_SQUARED) -> Tuple[bool, Optional[str]]:
        """
        Slope within rel_tol of target and a fit quality of at least min_r_squared

        Returns:
            (True, None) or (False, reason)
        """
        if self.r_squared < min_r_squared:
            return False, f"r² = {self.r_squared:.4f} below {min_r_squared}"
        if abs(self.slope - target) > rel_tol * abs(target):
            return False, f"slope {self.slope:.4f} vs target {target:.4f} (tol {rel_tol:.0%})"
        return True, None


def rate_fit(samples: Sequence[Tuple[float, float]], log_power: float = 0.0) -> RateFit:
    """
    Fit a power law through (ε, value) samples

    Args:
        samples: (epsilon, value) pairs, values > 0, epsilons distinct
        log_power: Fit value/|ln ε|^log_power instead of value (log-corrected regimes)

    Returns:
        RateFit with r² in [0, 1] (1 when the values are constant)
    """
    if len(samples) < MIN_FIT_POINTS:
        raise DomainError(f"rate fit needs at least {MIN_FIT_POINTS} samples, got {len(samples)}")
    eps = np.array([s[0] for s in samples], dtype=float)
    values = np.array([s[1] for s in samples], dtype=float)
    if np.any(eps <= 0) or len(np.unique(eps)) != len(eps):
        raise DomainError("sample epsilons must be positive and distinct")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DomainError("rate fit rejects non-positive or non-finite values")

    x = np.log(eps)
    y = np.log(values)
    if log_power:
        y = y - log_power * np.log(np.abs(x))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared,
                   n_points=len(eps), log_power=log_power, residual=math.sqrt(ss_res / len(eps)))


def fixed_slope_constant(samples: Sequence[Tuple[float, float]], slope: float) -> float:
    """Geometric mean of value·ε^{-slope}, the leading constant for a known rate"""
    logs = [math.log(v) - slope * math.log(e) for e, v in samples]
    return math.exp(sum(logs) / len(logs))


@dataclass
class TargetCheck:
    """
    One measured quantity against its target

    mode: "relative" (|m-t| <= tol·|t|), "maximum" (m <= t), "minimum" (m >= t)
    or "info" (never fails).
    """
    name: str
    measured: float
    target: float
    tolerance: float
    provenance: str
    mode: str = "relative"
    detail: str = ""

    @property
    def passed(self) -> bool:
        if self.mode == "info":
            return True
        if not math.isfinite(self.measured):
            return False
        if self.mode == "relative":
            return abs(self.measured - self.target) <= self.tolerance * abs(self.target)
        if self.mode == "maximum":
            return self.measured <= self.target
        if self.mode == "minimum":
            return self.measured >= self.target
        raise DomainError(f"unknown check mode {self.mode!r}")

    @property
    def status(self) -> str:
        if self.mode == "info":
            return "INFO"
        return "PASS" if self.passed else "FAIL"


class ExperimentReport:
    """
    Measured quantities, fits and target checks of one experiment

    Sweep samples are kept in long format (epsilon, quantity, value,
    error_estimate); the sweep parameter sits in the epsilon column.
    """

    def __init__(self, name: str, inputs: Optional[Dict] = None):
        self.name = name
        self.inputs: Dict = dict(inputs or {})
        self.checks: List[TargetCheck] = []
        self.fits: Dict[str, RateFit] = {}
        self.warnings: List[str] = []
        self.error: Optional[str] = None
        self.duration: float = 0.0
        self._rows: List[Dict] = []

    # -- building --------------------------------------------------------

    def add_sample(self, epsilon: float, quantity: str, value: float, error_estimate: float = 0.0):
        self._rows.append({"epsilon": float(epsilon), "quantity": quantity,
                           "value": float(value), "error_estimate": float(error_estimate)})

    def add_check(self, name: str, measured: float, target: float, tolerance: float,
                  provenance: str, mode: str = "relative", detail: str = "") -> TargetCheck:
        check = TargetCheck(name, float(measured), float(target), float(tolerance),
                            provenance, mode, detail)
        self.checks.append(check)
        return check

    def add_rate_check(self, name: str, fit: RateFit, target: float, rel_tol: float,
                       provenance: str, mode: str = "relative") -> TargetCheck:
        """
        Slope row for a fit, paired with its r² row

        mode "minimum" gates slope >= (1-rel_tol)·target (upper-bound exponents).
        """
        self.fits[name] = fit
        detail = f"r2={fit.r_squared:.6f} n={fit.n_points}"
        if mode == "minimum":
            check = self.add_check(f"{name} rate", fit.slope, (1.0 - rel_tol) * target, rel_tol,
                                   provenance, "minimum", detail)
        else:
            check = self.add_check(f"{name} rate", fit.slope, target, rel_tol, provenance, mode, detail)
        if mode != "info":
            self.add_check(f"{name} r2", fit.r_squared, MIN_R_SQUARED, 0.0, provenance, "minimum")
        return check

    def warn(self, message: str):
        print(f"⚠️ [{self.name}] {message}")
        self.warnings.append(message)

    # -- results ---------------------------------------------------------

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    @property
    def gated_checks(self) -> List[TargetCheck]:
        return [c for c in self.checks if c.mode != "info"]

    def samples(self) -> pd.DataFrame:
        return pd.DataFrame(self._rows, columns=SAMPLE_COLUMNS)

    def series(self, quantity: str) -> List[Tuple[float, float]]:
        return [(r["epsilon"], r["value"]) for r in self._rows if r["quantity"] == quantity]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"experiment": self.name, "check": c.name, "measured": c.measured, "target": c.target,
              "tolerance": c.tolerance, "mode": c.mode, "status": c.status,
              "provenance": c.provenance} for c in self.checks],
            columns=["experiment", "check", "measured", "target", "tolerance", "mode",
                     "status", "provenance"],
        )

    def summary_lines(self) -> List[str]:
        lines = [f"[{self.name}] " + ("PASS" if self.passed else "FAIL")]
        for key, value in sorted(self.inputs.items()):
            lines.append(f"  input {key}={value}")
        for c in self.checks:
            lines.append(
                f"  {c.status:<4} {c.name:<44} measured={c.measured:.6e} target={c.target:.6e} "
                f"tol={c.tolerance:.2e} mode={c.mode} ref=\"{c.provenance}\"" + (f" {c.detail}" if c.detail else "")
            )
        for w in self.warnings:
            lines.append(f"  WARN {w}")
        if self.error:
            lines.append(f"  ERROR {self.error}")
        return lines

    def print_summary(self):
        """Print the report as an aligned console table"""
        print("\n" + "=" * 70)
        print(f"📊 {self.name.upper()}")
        print("=" * 70)
        if self.inputs:
            print("\n⚙️ Inputs:")
            for key, value in sorted(self.inputs.items()):
                print(f"   {key:<20} {value}")
        print("\n🎯 Checks:")
        for c in self.checks:
            mark = {"PASS": "✅", "FAIL": "❌", "INFO": "ℹ️"}[c.status]
            print(f"   {mark} {c.name:<40} {c.measured:>14.6g}  target {c.target:>12.6g}")
        if self.error:
            print(f"\n❌ Error: {self.error}")
        print(f"\n{'✅ PASSED' if self.passed else '❌ FAILED'} ({self.duration:.1f}s)")
        print("=" * 70)


def emit_report(reports: Sequence[ExperimentReport], out_dir: str = "logs/campaign_results",
                timestamp: Optional[str] = None) -> str:
    """
    Write summary.txt and one CSV of samples per experiment

    Args:
        reports: Reports in the order they were submitted
        out_dir: Parent directory of the bundle
        timestamp: Bundle directory name (default: current time)

    Returns:
        Path of the bundle directory
    """
    if timestamp is None:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    bundle = os.path.join(out_dir, timestamp)
    os.makedirs(bundle, exist_ok=True)

    passed = sum(1 for r in reports if r.passed)
    lines = [
        "BUBBLE TOWER VERIFICATION CAMPAIGN",
        f"experiments={len(reports)} passed={passed} failed={len(reports) - passed}",
        f"rows={sum(len(r.gated_checks) for r in reports)}",
        "",
    ]
    for report in reports:
        lines.extend(report.summary_lines())
        lines.append("")
        report.samples().to_csv(os.path.join(bundle, f"{report.name}.csv"),
                                index=False, float_format="%.16e")

    summary_path = os.path.join(bundle, "summary.txt")
    with open(summary_path, "w", encoding="ascii", errors="replace") as f:
        f.write("\n".join(lines) + "\n")

    print(f"\n💾 Results saved to: {bundle}")
    return bundle
