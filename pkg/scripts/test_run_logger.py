"""
Test script for the JSON run history

Usage: Run from project root directory
    python scripts/test_run_logger.py
"""

import json
import os
import sys
import tempfile
from datetime import datetime, timedelta

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.run_logger import RunLogger


def test_log_run_appends_records():
    with tempfile.TemporaryDirectory() as tmp:
        logger = RunLogger(os.path.join(tmp, "runs"))
        assert os.path.isdir(logger.log_directory)

        first = logger.log_run("constants", {"N": 5, "csv": None}, 0, 0.1234, {"c1": 0.97})
        second = logger.log_run("critical-point", {"N": 5, "k": 2}, 3, 1.5, message="NewtonDivergenceError: x")

        assert first["status"] == "OK" and second["status"] == "FAILED"
        assert first["parameters"] == {"N": 5}
        assert first["duration_seconds"] == 0.123
        runs = logger.get_runs()
        assert [r["command"] for r in runs] == ["constants", "critical-point"]
        assert runs[1]["message"] == "NewtonDivergenceError: x"


def test_statistics():
    with tempfile.TemporaryDirectory() as tmp:
        logger = RunLogger(tmp)
        empty = logger.get_run_statistics()
        assert empty["total_runs"] == 0 and empty["by_command"] == {}

        logger.log_run("robin", {}, 0, 0.5)
        logger.log_run("robin", {}, 0, 0.25)
        logger.log_run("campaign", {}, 1, 2.0)
        stats = logger.get_run_statistics()
        assert stats["total_runs"] == 3
        assert stats["failed_runs"] == 1
        assert stats["success_rate"] == 66.67
        assert stats["total_duration"] == 2.75
        assert stats["by_command"] == {"robin": 2, "campaign": 1}
        assert logger.get_runs(datetime.now() - timedelta(days=400)) == []


def test_corrupt_daily_file_is_replaced():
    with tempfile.TemporaryDirectory() as tmp:
        logger = RunLogger(tmp)
        path = logger._get_daily_log_filename()
        with open(path, "w", encoding="utf-8") as f:
            f.write("{not json")
        logger.log_run("constants", {"N": 6}, 0, 0.1)
        with open(path, encoding="utf-8") as f:
            assert len(json.load(f)) == 1


def main():
    print("=" * 70)
    print("🧪 RUN LOGGER TEST")
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
    sys.exit(main())
