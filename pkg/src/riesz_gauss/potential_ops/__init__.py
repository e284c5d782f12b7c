"""Potential-theoretic operations on discretised sets."""

from .balayage import (
    balayage,
    balayage_rest_check,
    balayage_symmetry_check,
    capacity,
    domination_excess,
    equilibrium,
    harmonic_measure,
    idempotence_gap,
    linearity_gap,
    self_balayage_gap,
)
from .gauss import (
    DualFieldReport,
    SolvabilityThresholds,
    SolvabilityVerdict,
    classify_solvability,
    default_tol_c,
    dual_field_check,
    representation_check,
    sign_trichotomy_check,
    solve_gauss,
)
from .kelvin import KelvinReport, kelvin_equilibrium_check, kelvin_potential_error, kelvin_transform
from .results import BalayageResult, EquilibriumResult, GaussSolution, ThinnessReport, Verdict
from .sources import restrict_context, source_potential
from .suites import build_ladder, theorem_ap_suite, truncation_center
from .support import SupportReport, support_report
from .wiener import series_verdict, wiener_series

__all__ = [
    "BalayageResult", "DualFieldReport", "EquilibriumResult", "GaussSolution", "KelvinReport",
    "SolvabilityThresholds", "SolvabilityVerdict", "SupportReport", "ThinnessReport", "Verdict",
    "balayage", "balayage_rest_check", "balayage_symmetry_check", "build_ladder", "capacity",
    "classify_solvability", "default_tol_c", "domination_excess", "dual_field_check",
    "equilibrium", "harmonic_measure", "idempotence_gap", "kelvin_equilibrium_check",
    "kelvin_potential_error", "kelvin_transform", "linearity_gap", "representation_check",
    "restrict_context", "self_balayage_gap", "series_verdict", "sign_trichotomy_check",
    "solve_gauss", "source_potential", "support_report", "theorem_ap_suite",
    "truncation_center", "wiener_series",
]
