"""Declarative scenario runner for the potential-theory checks."""

from .cli import list_scenarios, main, run_scenario
from .config import CHECKS, ConfigError, Diagnostic, ScenarioConfig, load_config, validate_file
from .runner import CheckResult, Runner

__all__ = ["CHECKS", "CheckResult", "ConfigError", "Diagnostic", "Runner", "ScenarioConfig",
           "list_scenarios", "load_config", "main", "run_scenario", "validate_file"]
