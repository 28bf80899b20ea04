"""
Experiment Engine
Runs the configured campaign experiments as independent jobs
"""

import inspect
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

from src.errors import ConfigError
from src.run_config import RunConfig, unsupported_keys


class ExperimentEngine:
    """
    Campaign scheduler

    Jobs run concurrently on a thread pool; reports come back in the order the
    experiments appear in the configuration, so the bundle does not depend on
    scheduling.
    """

    def __init__(self, config: RunConfig):
        """
        Initialize the engine

        Args:
            config: Validated run configuration
        """
        self.config = config
        self.quad = config.quadrature()
        self.reports: List = []

    def select(self, only: Optional[str] = None) -> List[str]:
        """
        Enabled experiment names, filtered by substring when only is given

        Raises:
            ConfigError: when the filter matches nothing
        """
        names = self.config.enabled_experiments()
        if only:
            names = [name for name in names if only in name]
            if not names:
                raise ConfigError(f"no experiment matches '{only}'")
        return names

    def build_job(self, name: str) -> Tuple[Callable, Dict]:
        """
        Experiment routine and the keyword arguments it accepts

        Top-level settings the routine has no parameter for are dropped; an
        unknown key in the experiment entry itself raises ConfigError.
        """
        from src.experiments.experiment_suite import EXPERIMENTS

        settings = self.config.experiment_settings(name)
        kind = settings.pop("kind", name)
        settings.pop("enabled", None)
        if kind not in EXPERIMENTS:
            raise ConfigError(f"experiment '{name}' has unknown kind '{kind}'")
        routine = EXPERIMENTS[kind]
        unknown = unsupported_keys(self.config.experiments[name], routine)
        if unknown:
            raise ConfigError(f"experiment '{name}' ({kind}) does not accept {', '.join(unknown)}")
        accepted = inspect.signature(routine).parameters
        kwargs = {key: value for key, value in settings.items() if key in accepted}
        if "quad" in accepted:
            kwargs["quad"] = self.quad
        return routine, kwargs

    def _run_job(self, name: str):
        from src.experiments.experiment_result import ExperimentReport

        start = time.perf_counter()
        try:
            routine, kwargs = self.build_job(name)
            report = routine(**kwargs)
            report.name = name
        except Exception as exc:
            report = ExperimentReport(name)
            report.error = f"{type(exc).__name__}: {exc}"
            print(f"❌ Experiment '{name}' failed: {report.error}")
        report.duration = time.perf_counter() - start
        status = "✅" if report.passed else "❌"
        print(f"{status} {name} finished in {report.duration:.1f}s")
        return report

    def run(self, only: Optional[str] = None) -> List:
        """
        Run the selected experiments

        Args:
            only: Substring filter on experiment names

        Returns:
            Reports in configuration order
        """
        names = self.select(only)
        print("\n" + "=" * 70)
        print("🔬 STARTING CAMPAIGN")
        print("=" * 70)
        print(f"   Experiments: {', '.join(names)}")
        print(f"   Workers: {self.config.workers}")

        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            futures = [pool.submit(self._run_job, name) for name in names]
            self.reports = [future.result() for future in futures]

        passed = sum(1 for r in self.reports if r.passed)
        print(f"\n✅ Campaign complete: {passed}/{len(self.reports)} experiments passed")
        return self.reports
