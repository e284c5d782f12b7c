"""Nonnegative discrete measures on a :class:`DiscretizedSet`."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import DiscretizedSet

SUPPORT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weights ``w_i >= 0`` on the points of ``set``."""

    set: DiscretizedSet
    weights: np.ndarray
    mass: float = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size != self.set.n_points:
            raise DomainError(f"{w.size} weights for {self.set.n_points} points")
        if np.any(~np.isfinite(w)):
            raise DomainError("weights must be finite")
        if np.any(w < 0):
            raise DomainError("measure weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mass", math.fsum(w))

    @property
    def set_ref(self) -> int:
        return id(self.set)

    @property
    def points(self) -> np.ndarray:
        return self.set.points

    @classmethod
    def zero(cls, A: DiscretizedSet) -> "DiscreteMeasure":
        return cls(A, np.zeros(A.n_points))

    @classmethod
    def from_solver(cls, A: DiscretizedSet, w, clamp: float = 1e-12) -> "DiscreteMeasure":
        """Wrap solver output, clamping round-off negatives down to ``-clamp * max|w|``."""
        w = np.asarray(w, dtype=float)
        floor = -clamp * max(float(np.max(np.abs(w))) if w.size else 0.0, 1e-300)
        if np.any(w < floor):
            raise DomainError("solver returned significantly negative weights")
        return cls(A, np.maximum(w, 0.0))

    def to_rows(self):
        for i, (x, w) in enumerate(zip(self.set.points, self.weights)):
            yield [i, *map(float, x), float(w)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        dim = self.set.ambient_dim
        writer.writerow(["index", *[f"x{k + 1}" for k in range(dim)], "weight"])
        for row in self.to_rows():
            writer.writerow([row[0], *[repr(v) for v in row[1:]]])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"n_points": self.set.n_points, "mass": self.mass,
                "weights": [float(v) for v in self.weights]}


@dataclass(frozen=True)
class DiracMeasure:
    """Point charge ``charge * delta_location`` (used as an external source)."""

    location: tuple
    charge: float = 1.0

    def __post_init__(self):
        if not self.charge > 0:
            raise DomainError(f"Dirac charge must be positive, got {self.charge}")
        object.__setattr__(self, "location", tuple(float(c) for c in self.location))

    @property
    def points(self) -> np.ndarray:
        return np.asarray([self.location])

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.charge])

    @property
    def mass(self) -> float:
        return float(self.charge)

    def to_json(self) -> dict:
        return {"location": list(self.location), "charge": self.charge}


def _check_same(mu: DiscreteMeasure, nu: DiscreteMeasure):
    if mu.set is not nu.set:
        raise DomainError("measures live on different discretised sets")


def restrict(mu: DiscreteMeasure, mask) -> DiscreteMeasure:
    """Trace of ``mu`` on the points selected by ``mask``."""
    mask = np.asarray(mask, dtype=bool).reshape(-1)
    if mask.size != mu.weights.size:
        raise DomainError("mask length does not match the point count")
    return DiscreteMeasure(mu.set, np.where(mask, mu.weights, 0.0))


def combine(a1: float, mu1: DiscreteMeasure, a2: float, mu2: DiscreteMeasure) -> DiscreteMeasure:
    """``a1 * mu1 + a2 * mu2`` with nonnegative coefficients."""
    if a1 < 0 or a2 < 0:
        raise DomainError("combine only forms nonnegative combinations")
    _check_same(mu1, mu2)
    return DiscreteMeasure(mu1.set, a1 * mu1.weights + a2 * mu2.weights)


def normalize(mu: DiscreteMeasure) -> DiscreteMeasure:
    if not mu.mass > 0:
        raise DomainError("cannot normalise the zero measure")
    return DiscreteMeasure(mu.set, mu.weights / mu.mass)


def scale(mu: DiscreteMeasure, a: float) -> DiscreteMeasure:
    return DiscreteMeasure(mu.set, a * mu.weights)


def support_points(mu: DiscreteMeasure, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Indices with weight above ``tol`` times the largest weight."""
    if tol < 0:
        raise DomainError("support tolerance must be nonnegative")
    w = mu.weights
    top = float(w.max()) if w.size else 0.0
    if top <= 0:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(w > tol * top)


def snap_dirac(delta: DiracMeasure, A: DiscretizedSet, tol: float | None = None):
    """Index of the grid point the Dirac sits on (within ``tol``), else None."""
    tol = 1e-9 * max(A.mesh_size, 1.0) if tol is None else tol
    d = np.linalg.norm(A.points - np.asarray(delta.location), axis=1)
    i = int(np.argmin(d))
    return i if d[i] <= tol else None


def read_measure_csv(path, dim: int) -> DiscreteMeasure:
    """Read a point measure written by :meth:`DiscreteMeasure.to_csv`.

    The points become their own cloud (unit quadrature weights, no tags),
    which is how a measure file enters as a field source.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty measure file")
    header, body = rows[0], rows[1:]
    want = ["index", *[f"x{k + 1}" for k in range(dim)], "weight"]
    if [h.strip() for h in header] != want:
        raise DomainError(f"{path}: header must be {','.join(want)}")
    data = np.array([[float(v) for v in r[1:]] for r in body if r], dtype=float).reshape(-1, dim + 1)
    n = data.shape[0]
    cloud = DiscretizedSet(data[:, :dim], np.ones(n), np.zeros(n, dtype=bool), dim, label=str(path))
    return DiscreteMeasure(cloud, data[:, dim])
