"""Kelvin transform of measures and the harmonic-measure identity it yields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..geometry import DiscretizedSet, invert_point, invert_set, pole_tolerance
from ..kernel import RieszParams, assemble, energy, kernel
from ..measures import DiscreteMeasure
from .balayage import equilibrium, harmonic_measure


def kelvin_transform(mu: DiscreteMeasure, center, params: RieszParams) -> DiscreteMeasure:
    """Invert the support about the unit sphere at ``center``; weights gain ``|y - c|^(alpha - n)``.

    Grid nodes on the centre are only allowed when they carry no mass; they
    are dropped from the image.
    """
    c = np.asarray(center, dtype=float)
    A = mu.set
    r = np.linalg.norm(A.points - c, axis=1)
    pole = r <= pole_tolerance(A)
    if np.any(pole & (mu.weights > 0)):
        raise DomainError("Kelvin centre lies in the support of the measure")
    if np.any(pole):
        keep = np.flatnonzero(~pole)
        A = A.subset(keep)
        w, r = mu.weights[keep], r[keep]
    else:
        w = mu.weights
    image = invert_set(A, c)
    return DiscreteMeasure(image, w * r ** params.exponent)


def kelvin_potential_error(mu: DiscreteMeasure, center, params: RieszParams, probes) -> float:
    """Largest relative error in ``U^{mu*}(x*) = |x - c|^(n - alpha) U^mu(x)`` at the probes."""
    c = np.asarray(center, dtype=float)
    x = np.atleast_2d(np.asarray(probes, dtype=float))
    star = kelvin_transform(mu, c, params)
    left = kernel(params, invert_point(x, c), star.set.points) @ star.weights
    right = np.linalg.norm(x - c, axis=1) ** (-params.exponent) * (kernel(params, x, mu.set.points) @ mu.weights)
    return float(np.max(np.abs(left - right) / np.maximum(np.abs(right), 1e-300)))


@dataclass(frozen=True)
class KelvinReport:
    distance: float
    mass_harmonic: float
    mass_kelvin: float
    n_points: int

    @property
    def mass_gap(self) -> float:
        return abs(self.mass_harmonic - self.mass_kelvin) / max(self.mass_harmonic, 1e-300)

    def summary(self) -> dict:
        return {"distance": self.distance, "mass_harmonic": self.mass_harmonic,
                "mass_kelvin": self.mass_kelvin, "mass_gap": self.mass_gap,
                "n_points": self.n_points}


def kelvin_equilibrium_check(A: DiscretizedSet, z, params: RieszParams, **assemble_kw) -> KelvinReport:
    """Compare the harmonic measure of ``z`` with the Kelvin image of the inverted set's equilibrium.

    Both measures live on A's grid (inverting twice returns A's points in the
    same order), so their distance is measured in A's energy norm, relative
    to the harmonic measure.
    """
    z = np.asarray(z, dtype=float)
    ctx = assemble(params, A, **assemble_kw)
    eps = harmonic_measure(ctx, z, spot_checks=0).swept
    A_star = invert_set(A, z)
    eq_star = equilibrium(assemble(params, A_star, **assemble_kw))
    back = kelvin_transform(eq_star.gamma, z, params)
    d = eps.weights - back.weights
    dist = math.sqrt(max(energy(ctx, d), 0.0)) / math.sqrt(max(energy(ctx, eps), 1e-300))
    return KelvinReport(dist, eps.mass, back.mass, A.n_points)
