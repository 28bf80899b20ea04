"""
Test script for the run configuration and the experiment engine

Usage: Run from project root directory
    python scripts/test_run_config.py
"""

import json
import os
import sys
import tempfile

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from src.errors import ConfigError
from src.experiments import ExperimentEngine
from src.experiments.experiment_suite import EXPERIMENTS
from src.run_config import DEFAULT_EXPERIMENTS, RunConfig, load_run_config


def _write(path: str, content):
    with open(path, "w", encoding="utf-8") as f:
        f.write(content if isinstance(content, str) else json.dumps(content))


def test_defaults_are_valid():
    config = RunConfig()
    config.validate()
    assert (config.N, config.k) == (5, 1)
    assert config.enabled_experiments() == list(DEFAULT_EXPERIMENTS)
    quad = config.quadrature()
    assert quad.rel_tol == config.rel_tol
    assert quad.max_subdivisions == config.max_subdivisions


def test_default_experiment_kinds_are_registered():
    for entry in DEFAULT_EXPERIMENTS.values():
        assert entry["kind"] in EXPERIMENTS


INVALID_OVERRIDES = [
    {"N": 4}, {"N": 13}, {"k": 0}, {"d": 1.5}, {"radius": 0.4},
    {"eps_min": 1e-3, "eps_max": 1e-4}, {"eps_max": 0.6}, {"eps_samples": 3},
    {"grid_nodes": 128}, {"rel_tol": 0.0}, {"workers": 0},
]


def test_invalid_settings_rejected():
    for override in INVALID_OVERRIDES:
        with pytest.raises(ConfigError):
            RunConfig().with_overrides(**override)


def test_unknown_experiment_kind_rejected():
    with pytest.raises(ConfigError):
        RunConfig(experiments={"x": {"kind": "lottery"}}).validate()
    with pytest.raises(ConfigError):
        RunConfig(experiments={"x": 3}).validate()


def test_with_overrides_ignores_none():
    base = RunConfig(N=7)
    config = base.with_overrides(N=None, k=2, eps_min=None)
    assert config.N == 7 and config.k == 2 and config.eps_min == base.eps_min
    config.experiments["constants"]["N"] = 9
    assert base.experiments["constants"]["N"] == 5


def test_experiment_settings_merge():
    config = RunConfig(N=6, eps_samples=5)
    settings = config.experiment_settings("projection_remainder")
    assert settings["N"] == 6
    assert settings["eps_samples"] == 5
    assert settings["eps_min"] == 1e-4 and settings["mu"] == 0.5
    assert config.experiment_settings("constants")["N"] == 5
    with pytest.raises(ConfigError):
        config.experiment_settings("missing")


def test_load_creates_default_file():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "configs", "campaign.json")
        config = load_run_config(path)
        assert os.path.exists(path)
        with open(path, encoding="utf-8") as f:
            content = json.load(f)
        assert "_comments" in content
        assert config.experiments == RunConfig().experiments
        assert load_run_config(path) == config


def test_load_merges_and_strips_comments():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "campaign.json")
        _write(path, {"_comments": {"N": "dimension"}, "N": 7, "eps_samples": 5,
                      "experiments": {"constants": {"kind": "constants", "_note": "x"}}})
        config = load_run_config(path)
        assert config.N == 7 and config.eps_samples == 5
        assert config.experiments == {"constants": {"kind": "constants"}}


def test_load_rejects_bad_files():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "campaign.json")
        for content in ['{"N": 5,', {"lot_size": 0.01}, {"N": 4}, {"N": "five"}]:
            _write(path, content)
            with pytest.raises(ConfigError):
                load_run_config(path)


def test_engine_select_and_build_job():
    config = RunConfig(experiments={
        "constants": {"kind": "constants", "N": 6},
        "residual_k2": {"kind": "residual", "k": 2, "eps_samples": 5},
        "pz_scaling": {"kind": "pz_scaling", "enabled": False},
    })
    engine = ExperimentEngine(config)
    assert engine.select() == ["constants", "residual_k2"]
    assert engine.select("resid") == ["residual_k2"]
    with pytest.raises(ConfigError):
        engine.select("pz")

    routine, kwargs = engine.build_job("residual_k2")
    assert routine is EXPERIMENTS["residual"]
    assert kwargs["k"] == 2 and kwargs["eps_samples"] == 5 and kwargs["grid_nodes"] == 512
    assert kwargs["quad"] is engine.quad
    assert "d" not in kwargs

    routine, kwargs = engine.build_job("constants")
    assert kwargs["N"] == 6
    assert "eps_min" not in kwargs



def test_misspelled_experiment_key_rejected():
    typo = {"residual_k1": {"kind": "residual", "k": 1, "eps_mn": 1e-3}}
    with pytest.raises(ConfigError) as info:
        RunConfig(experiments=typo).validate()
    assert "eps_mn" in str(info.value)
    with pytest.raises(ConfigError):
        ExperimentEngine(RunConfig(experiments=typo)).build_job("residual_k1")
    with pytest.raises(ConfigError):
        RunConfig(experiments={"constants": {"kind": "constants", "quad": None}}).validate()
    # comments and the scheduling keys stay allowed
    RunConfig(experiments={"constants": {"kind": "constants", "enabled": False, "_note": "x"}}).validate()


def test_default_two_bubble_entries_sweep_the_asymptotic_range():
    config = RunConfig()
    config.validate()
    for name in ("energy_k2", "residual_k2", "interaction"):
        settings = config.experiment_settings(name)
        assert settings["eps_min"] == 1e-14 and settings["eps_max"] == 1e-10
    assert config.experiment_settings("energy_k1")["eps_max"] == config.eps_max
    assert load_run_config().experiments == DEFAULT_EXPERIMENTS


def test_engine_records_failures():
    config = RunConfig(experiments={"interaction": {"kind": "interaction", "k": 1}})
    reports = ExperimentEngine(config).run()
    assert len(reports) == 1
    assert reports[0].name == "interaction"
    assert reports[0].error.startswith("DomainError")
    assert not reports[0].passed


def main():
    print("=" * 70)
    print("🧪 RUN CONFIGURATION TEST")
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
