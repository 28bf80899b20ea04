# Experiments Module

"""
Verification campaigns: rate fits, target checks and report bundles
"""

from .experiment_engine import ExperimentEngine
from .experiment_result import ExperimentReport, RateFit, TargetCheck, emit_report, rate_fit

__all__ = ['ExperimentEngine', 'ExperimentReport', 'RateFit', 'TargetCheck', 'emit_report', 'rate_fit']
