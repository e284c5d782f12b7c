"""Where the minimiser lives: whole set, boundary layer, or a compact piece."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import DiscretizedSet
from ..measures import SUPPORT_TOL, support_points
from .results import GaussSolution


@dataclass(frozen=True)
class SupportReport:
    point_fraction: float
    boundary_mass_fraction: float
    support_radius: float
    truncation_radius: float | None
    n_support: int
    classification: str

    def summary(self) -> dict:
        return {
            "point_fraction": self.point_fraction,
            "boundary_mass_fraction": self.boundary_mass_fraction,
            "support_radius": self.support_radius,
            "truncation_radius": self.truncation_radius,
            "n_support": self.n_support,
            "classification": self.classification,
        }


def support_report(gauss: GaussSolution, A: DiscretizedSet | None = None, center=None,
                   tol: float = SUPPORT_TOL, full_fraction: float = 0.95,
                   boundary_fraction: float = 0.95, compact_fraction: float = 0.6) -> SupportReport:
    """Classify the support of the minimiser.

    ``full_support`` when at least ``full_fraction`` of the grid carries
    weight; otherwise ``compactly_contained`` when the set is truncated and
    the outermost support point lies within ``compact_fraction`` of the
    truncation radius (measured from ``center``, the origin by default);
    otherwise ``boundary_concentrated`` when at least ``boundary_fraction`` of
    the mass sits on boundary-tagged points; ``unclassified`` if none apply.
    """
    A = gauss.lam.set if A is None else A
    w = gauss.lam.weights
    idx = support_points(gauss.lam, tol)
    c = np.zeros(A.ambient_dim) if center is None else np.asarray(center, dtype=float)
    frac = idx.size / A.n_points
    total = float(w[idx].sum())
    bmass = float(w[idx][A.boundary[idx]].sum()) / total if total > 0 else 0.0
    radius = float(np.max(np.linalg.norm(A.points[idx] - c, axis=1))) if idx.size else 0.0
    R = A.truncation_radius
    if frac >= full_fraction:
        cls = "full_support"
    elif R is not None and radius < compact_fraction * R:
        cls = "compactly_contained"
    elif bmass >= boundary_fraction:
        cls = "boundary_concentrated"
    else:
        cls = "unclassified"
    return SupportReport(frac, bmass, radius, R, int(idx.size), cls)
