"""
Run Configuration
Campaign and command settings loaded from src/configs/campaign_config.json
"""

import copy
import inspect
import json
import os
from dataclasses import dataclass, field, fields
from typing import Callable, Dict, List, Optional

from src.errors import ConfigError
from src.quadrature import QuadratureEngine

DEFAULT_CONFIG_FILE = "src/configs/campaign_config.json"
ENTRY_KEYS = ("kind", "enabled")

DEFAULT_EXPERIMENTS: Dict[str, Dict] = {
    "constants": {"kind": "constants", "N": 5},
    "certificate_k1": {"kind": "certificate", "k": 1},
    "certificate_k2": {"kind": "certificate", "k": 2},
    "energy_k1": {"kind": "energy_expansion", "k": 1},
    "energy_k2": {"kind": "energy_expansion", "k": 2, "eps_min": 1e-14, "eps_max": 1e-10},
    "residual_k1": {"kind": "residual", "k": 1},
    "residual_k2": {"kind": "residual", "k": 2, "eps_min": 1e-14, "eps_max": 1e-10},
    "interaction": {"kind": "interaction", "k": 2, "eps_min": 1e-14, "eps_max": 1e-10},
    "projection_defect": {"kind": "projection_defect", "mu_min": 0.005, "mu_max": 0.1,
                          "mu_samples": 7, "path_exponent": 3.0},
    "projection_remainder": {"kind": "projection_remainder", "mu": 0.5, "r_fixed": 0.3,
                             "eps_min": 1e-4, "eps_max": 1e-2},
    "pz_scaling": {"kind": "pz_scaling"},
}


@dataclass
class RunConfig:
    """
    Settings shared by the CLI commands and the campaign

    Experiment entries override the top-level values for that experiment only.
    """
    N: int = 5
    k: int = 1
    d: float = 0.05
    radius: float = 1.0
    eps_min: float = 1e-6
    eps_max: float = 1e-3
    eps_samples: int = 7
    grid_nodes: int = 512
    abs_tol: float = 1e-14
    rel_tol: float = 1e-11
    max_subdivisions: int = 400
    output_dir: str = "logs/campaign_results"
    workers: int = 4
    experiments: Dict[str, Dict] = field(default_factory=lambda: copy.deepcopy(DEFAULT_EXPERIMENTS))

    def quadrature(self) -> QuadratureEngine:
        return QuadratureEngine(abs_tol=self.abs_tol, rel_tol=self.rel_tol,
                                max_subdivisions=self.max_subdivisions)

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with the non-None overrides applied and validated"""
        values = {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}
        values.update({key: value for key, value in overrides.items() if value is not None})
        config = RunConfig(**values)
        config.validate()
        return config

    def experiment_settings(self, name: str) -> Dict:
        """Top-level sweep settings merged with one experiment entry"""
        if name not in self.experiments:
            raise ConfigError(f"unknown experiment '{name}'")
        settings = {
            "N": self.N, "k": self.k, "d": self.d, "radius": self.radius,
            "eps_min": self.eps_min, "eps_max": self.eps_max, "eps_samples": self.eps_samples,
            "grid_nodes": self.grid_nodes,
        }
        settings.update({key: value for key, value in self.experiments[name].items()
                         if not key.startswith("_")})
        return settings

    def enabled_experiments(self) -> List[str]:
        return [name for name, entry in self.experiments.items() if entry.get("enabled", True)]

    def validate(self):
        """
        Check every setting against the module preconditions

        Raises:
            ConfigError: on the first invalid value
        """
        if not isinstance(self.N, int) or not 5 <= self.N <= 12:
            raise ConfigError(f"N must be an integer in 5..12, got {self.N!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigError(f"k must be a positive integer, got {self.k!r}")
        if not 0.0 < self.d < 1.0:
            raise ConfigError(f"box parameter d must lie in (0, 1), got {self.d}")
        if not self.radius > 0.5:
            raise ConfigError(f"ball radius must exceed the decomposition radius 0.5, got {self.radius}")
        if not 0.0 < self.eps_min < self.eps_max < 0.5:
            raise ConfigError(f"need 0 < eps_min < eps_max < 0.5, got ({self.eps_min}, {self.eps_max})")
        if self.eps_samples < 4:
            raise ConfigError(f"rate fits need at least 4 samples, got {self.eps_samples}")
        if self.grid_nodes < 256:
            raise ConfigError(f"grid_nodes must be at least 256, got {self.grid_nodes}")
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.max_subdivisions < 16:
            raise ConfigError("quadrature tolerances must be positive and max_subdivisions >= 16")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")

        from src.experiments.experiment_suite import EXPERIMENTS

        for name, entry in self.experiments.items():
            if not isinstance(entry, dict):
                raise ConfigError(f"experiment '{name}' must be an object")
            kind = entry.get("kind", name)
            if kind not in EXPERIMENTS:
                raise ConfigError(f"experiment '{name}' has unknown kind '{kind}'")
            unknown = unsupported_keys(entry, EXPERIMENTS[kind])
            if unknown:
                raise ConfigError(f"experiment '{name}' ({kind}) does not accept {', '.join(unknown)}")


def unsupported_keys(entry: Dict, routine: Callable) -> List[str]:
    """Keys of an experiment entry that the routine has no parameter for"""
    accepted = inspect.signature(routine).parameters
    return sorted(key for key in entry
                  if not key.startswith("_") and key not in ENTRY_KEYS
                  and (key not in accepted or key == "quad"))


def _strip_comments(data):
    if isinstance(data, dict):
        return {key: _strip_comments(value) for key, value in data.items() if not key.startswith("_")}
    return data


def _default_file_content() -> Dict:
    defaults = RunConfig()
    content = {
        "_comments": {
            "N": "Space dimension (5..12)",
            "k": "Number of bubbles in the tower",
            "eps_min/eps_max/eps_samples": "Geometric epsilon sweep",
            "experiments": "One entry per campaign experiment; 'kind' selects the routine, other keys override the top level",
        }
    }
    content.update({f.name: copy.deepcopy(getattr(defaults, f.name)) for f in fields(defaults)})
    return content


def load_run_config(config_file: Optional[str] = None) -> RunConfig:
    """
    Load a RunConfig from JSON, merged over the built-in defaults

    A missing file is created with the defaults. Keys starting with '_' are
    ignored.

    Raises:
        ConfigError: unreadable JSON, unknown keys or invalid values
    """
    config_file = config_file or DEFAULT_CONFIG_FILE
    project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    path = config_file if os.path.isabs(config_file) else os.path.join(project_root, config_file)

    if not os.path.exists(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_default_file_content(), f, indent=4, ensure_ascii=False)
        print(f"📝 Created default config: {path}")

    try:
        with open(path, "r", encoding="utf-8") as f:
            loaded = _strip_comments(json.load(f))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(loaded) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")

    try:
        config = RunConfig(**loaded)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}")
    config.validate()
    return config
