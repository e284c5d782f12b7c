"""Result records returned by the potential-theory operations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kernel import EnergyContext
from ..measures import DiscreteMeasure
from ..qp import QpSolution


def rel_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    """Normalised equilibrium measure ``gamma = mu_robin / W`` and its capacity."""

    gamma: DiscreteMeasure
    capacity: float
    robin_energy: float
    potential_on_set: np.ndarray = field(repr=False)
    robin: DiscreteMeasure = field(repr=False)
    solution: QpSolution = field(repr=False)
    truncated: bool = False
    energy: float = float("nan")

    @property
    def triple_gap(self) -> float:
        """Largest pairwise relative gap among mass, energy and capacity."""
        m, e, c = self.gamma.mass, self.energy, self.capacity
        return max(rel_gap(m, c), rel_gap(e, c), rel_gap(m, e))

    @property
    def potential_tol(self) -> float:
        return self.solution.kkt_tol / self.robin_energy

    def summary(self) -> dict:
        on = self.gamma.weights > 0
        return {
            "capacity": self.capacity,
            "robin_energy": self.robin_energy,
            "gamma_mass": self.gamma.mass,
            "gamma_energy": self.energy,
            "triple_gap": self.triple_gap,
            "min_potential": float(self.potential_on_set.min()),
            "max_potential": float(self.potential_on_set.max()),
            "max_potential_on_support": float(self.potential_on_set[on].max()),
            "n_points": self.gamma.set.n_points,
            "truncated": self.truncated,
        }


@dataclass(frozen=True, eq=False)
class BalayageResult:
    """Swept measure ``zeta^A`` together with its bookkeeping."""

    swept: DiscreteMeasure
    mass_before: float
    mass_after: float
    potential_gap: np.ndarray = field(repr=False)
    projection_distance: float | None
    solution: QpSolution | None = field(default=None, repr=False)
    source_potential: np.ndarray | None = field(default=None, repr=False)
    coincident: bool = False
    min_energy_ok: bool = True

    def summary(self) -> dict:
        on = self.swept.weights > 0
        gap_on = self.potential_gap[on]
        return {
            "mass_before": self.mass_before,
            "mass_after": self.mass_after,
            "max_abs_gap_on_support": float(np.max(np.abs(gap_on))) if gap_on.size else 0.0,
            "projection_distance": self.projection_distance,
            "coincident_source": self.coincident,
            "min_energy_spot_check": self.min_energy_ok,
        }


@dataclass(frozen=True, eq=False)
class GaussSolution:
    """Minimiser of the Gauss functional on a grid plus its equilibrium constant.

    ``c_const`` is the mass multiplier of the quadratic program and ``c_mean``
    the weight-averaged value of ``U^lambda - U^omega`` over the support; the
    two are independent estimates of the same constant.
    """

    lam: DiscreteMeasure
    c_const: float
    c_mean: float
    w_value: float
    kkt_residual: float
    kkt_tol: float
    weighted_potential: np.ndarray = field(repr=False)
    field_potential: np.ndarray = field(repr=False)
    ctx: EnergyContext = field(repr=False)
    solution: QpSolution = field(repr=False)
    solvable: bool = True
    reason: str = "finite grid"
    coincident: bool = False

    @property
    def field_scale(self) -> float:
        """Magnitude of the external field on the grid (falls back to the potential)."""
        s = float(np.max(np.abs(self.field_potential)))
        if s > 0:
            return s
        return float(np.max(np.abs(self.weighted_potential)))

    @property
    def estimates_agree(self) -> bool:
        return abs(self.c_const - self.c_mean) <= self.kkt_tol

    @property
    def cc_residual(self) -> float:
        """``|c - (w_f - int f dlambda) / m|``, i.e. the constant recomputed from energies."""
        m = self.lam.mass
        return abs(self.c_const - (self.w_value + float(self.lam.weights @ self.field_potential)) / m)

    def kkt_report(self) -> dict:
        r, c, tol = self.weighted_potential, self.c_const, self.kkt_tol
        on = self.lam.weights > 0
        return {
            "min_excess": float(np.min(r - c)),
            "max_dev_on_support": float(np.max(np.abs(r[on] - c))) if np.any(on) else 0.0,
            "kkt_tol": tol,
            "lower_ok": bool(np.all(r >= c - tol)),
            "support_ok": bool(np.all(np.abs(r[on] - c) <= tol)),
            "estimates_agree": self.estimates_agree,
        }

    def summary(self) -> dict:
        return {
            "c_const": self.c_const,
            "c_mean": self.c_mean,
            "w_value": self.w_value,
            "mass": self.lam.mass,
            "kkt_residual": self.kkt_residual,
            "kkt_tol": self.kkt_tol,
            "cc_residual": self.cc_residual,
            "solvable": self.solvable,
            "reason": self.reason,
            "coincident_source": self.coincident,
        }


@dataclass(frozen=True)
class ThinnessReport:
    mode: str
    ratio: float
    terms: tuple
    partial_sums: tuple
    shell_indices: tuple
    verdict: str
    shells_used: int
    decay_ratio: float = 0.7
    floor: float = 0.1

    def summary(self) -> dict:
        return {
            "mode": self.mode,
            "ratio": self.ratio,
            "verdict": self.verdict,
            "shells_used": self.shells_used,
            "last_partial_sum": self.partial_sums[-1] if self.partial_sums else 0.0,
            "decay_ratio_threshold": self.decay_ratio,
            "floor_threshold": self.floor,
        }


@dataclass(frozen=True)
class Verdict:
    """Three-valued check outcome: ``pass``, ``fail`` or ``inconclusive``."""

    status: str
    detail: str = ""
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"
