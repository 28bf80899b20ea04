"""
Test script for the command-line front-end
Runs the commands in-process with a temporary run log

Usage: Run from project root directory
    python scripts/test_cli.py
"""

import os
import sys
import tempfile

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pandas as pd
import pytest

from src.cli import (EXIT_FAILED, EXIT_OK, EXIT_PRECONDITION, EXIT_SOLVER, build_parser,
                     exit_code_for, main)
from src.errors import (BoxCollisionError, ConfigError, DomainError, NewtonDivergenceError,
                        QuadratureError, RegimeError, ScaleOrderingError, SingularDerivativeError,
                        VerificationError)
from src.run_logger import RunLogger


def test_constants_command_writes_csv():
    with tempfile.TemporaryDirectory() as tmp:
        logger = RunLogger(os.path.join(tmp, "logs"))
        path = os.path.join(tmp, "constants.csv")
        assert main(["constants", "--N", "5", "--csv", path], logger=logger) == EXIT_OK

        frame = pd.read_csv(path)
        assert list(frame["quantity"]) == ["alpha_N", "c1", "c2", "c3", "gamma0", "robin_H00"]
        for _, row in frame.iterrows():
            assert row["value"] == pytest.approx(row["target"], rel=1e-8)
        record = logger.get_runs()[-1]
        assert record["command"] == "constants" and record["status"] == "OK"
        assert record["parameters"]["N"] == 5


def test_unsupported_dimension_is_a_precondition_error():
    with tempfile.TemporaryDirectory() as tmp:
        logger = RunLogger(tmp)
        assert main(["constants", "--N", "4"], logger=logger) == EXIT_PRECONDITION
        assert main(["critical-point", "--N", "13"], logger=logger) == EXIT_PRECONDITION
        runs = logger.get_runs()
        assert [r["status"] for r in runs] == ["FAILED", "FAILED"]
        assert runs[0]["message"].startswith("DomainError")
        assert runs[1]["message"].startswith("ConfigError")


def test_robin_command():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "robin.csv")
        assert main(["robin", "--N", "6", "--radius", "2.0", "--csv", path], logger=RunLogger(tmp)) == EXIT_OK
        frame = pd.read_csv(path)
        assert frame["value"][0] == pytest.approx(frame["target"][0], rel=1e-14)
        assert frame["value"][0] == pytest.approx(2.0 ** -2 * 8.0 / 6.0)


def test_critical_point_command_writes_record():
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "cert.txt")
        logger = RunLogger(tmp)
        assert main(["critical-point", "--N", "5", "--k", "1", "--out", out], logger=logger) == EXIT_OK
        with open(out, encoding="utf-8") as f:
            record = f.read()
        assert record.startswith("k=1\nN=5\n")
        assert "passed=True" in record
        assert logger.get_runs()[-1]["headline"]["mu"][0] == pytest.approx((75.0 / 8.0) ** 0.25, rel=1e-8)
        headline = logger.get_runs()[-1]["headline"]
        assert headline["sigma_hessian_ok"] is True
        assert headline["newton_iterations"] >= 1


def test_project_command_regime_guard():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "project.csv")
        code = main(["project", "--N", "5", "--mu", "0.01", "--eps", "0.005", "--csv", path],
                    logger=RunLogger(tmp))
        assert code == EXIT_OK
        frame = pd.read_csv(path)
        assert {"r", "U", "defect"} <= set(frame.columns)


def test_campaign_command_writes_bundle():
    with tempfile.TemporaryDirectory() as tmp:
        config = os.path.join(tmp, "campaign.json")
        out = os.path.join(tmp, "results")
        logger = RunLogger(os.path.join(tmp, "logs"))
        code = main(["campaign", "--config", config, "--only", "constants", "--out", out], logger=logger)
        assert code == EXIT_OK
        assert os.path.exists(config)
        bundle = logger.get_runs()[-1]["headline"]["bundle"]
        assert os.path.dirname(bundle) == out
        assert sorted(os.listdir(bundle)) == ["constants.csv", "summary.txt"]

        assert main(["campaign", "--config", config, "--only", "nothing-matches"], logger=logger) \
            == EXIT_PRECONDITION


def test_no_command_prints_help():
    assert main([], logger=None) == EXIT_PRECONDITION


def test_parser_defaults():
    args = build_parser().parse_args(["project", "--N", "7"])
    assert args.mu == 0.5 and args.method == "exact" and args.eps is None
    with pytest.raises(SystemExit):
        build_parser().parse_args(["project", "--method", "spectral"])


def test_exit_code_mapping():
    for exc in (DomainError("x"), ConfigError("x"), RegimeError("x"), ScaleOrderingError("x"),
                SingularDerivativeError("x")):
        assert exit_code_for(exc) == EXIT_PRECONDITION
    for exc in (NewtonDivergenceError("x", 50, 1.0), BoxCollisionError("x"), QuadratureError("x", 1.0, 0.1),
                VerificationError("x")):
        assert exit_code_for(exc) == EXIT_SOLVER
    assert exit_code_for(RuntimeError("x")) == EXIT_FAILED


def main_runner():
    print("=" * 70)
    print("🧪 CLI TEST")
    print("=" * 70)

    tests = [value for name, value in globals().items() if name.startswith("test_") and callable(value)]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"   ✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"   ❌ {test.__name__}: {e}")

    print(f"\n📊 {len(tests) - failed}/{len(tests)} tests passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main_runner())
