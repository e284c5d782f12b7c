"""Riesz kernel ``|x - y|^(alpha - n)``: matrix assembly, potentials, energies.

The kernel is infinite on the diagonal.  The assembled matrix replaces the
self-interaction of point ``i`` by ``(C_DIAG * h_i)^(alpha - n)`` where
``h_i`` is the distance to its nearest neighbour.  Rows are assembled in
fixed-size blocks; each entry depends only on its own pair of points, so the
result is bit-identical for any number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AssemblyError, ConfigurationError, DomainError, ResourceError
from .geometry import DiscretizedSet

C_DIAG = 0.5
DIAG_RULE = "half-nearest-neighbour"
DEFAULT_MAX_POINTS = 20_000
_BLOCK = 512


@dataclass(frozen=True)
class RieszParams:
    dim: int
    alpha: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ConfigurationError(f"dimension must be an integer >= 2, got {self.dim}")
        if not (0.0 < self.alpha <= 2.0 and self.alpha < self.dim):
            raise ConfigurationError(
                f"alpha must satisfy 0 < alpha <= 2 and alpha < n; got alpha={self.alpha}, n={self.dim}")

    @property
    def exponent(self) -> float:
        return self.alpha - self.dim


def kernel(params: RieszParams, x, y) -> np.ndarray:
    """Pairwise kernel values between the rows of ``x`` and ``y`` (no regularisation)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    d = _distances(x, y)
    with np.errstate(divide="ignore"):
        return d ** params.exponent


def _distances(x, y):
    diff = x[:, None, :] - y[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


@dataclass(frozen=True, eq=False)
class EnergyContext:
    params: RieszParams
    set: DiscretizedSet
    K: np.ndarray = field(repr=False)
    diag_rule_id: str = DIAG_RULE

    @property
    def n_points(self) -> int:
        return self.set.n_points

    @property
    def points(self) -> np.ndarray:
        return self.set.points


def _fill_rows(K, pts, exponent, lo, hi):
    d = _distances(pts[lo:hi], pts)
    with np.errstate(divide="ignore"):
        K[lo:hi] = d ** exponent


def assemble(params: RieszParams, A: DiscretizedSet, max_points: int = DEFAULT_MAX_POINTS,
             threads: int = 1, spacing=None) -> EnergyContext:
    """Dense kernel matrix over ``A`` with the regularised diagonal.

    ``spacing`` overrides the per-point nearest-neighbour distances used on
    the diagonal, e.g. to give a sub-cloud the spacing of its parent grid.
    """
    if params.dim != A.ambient_dim:
        raise ConfigurationError(f"kernel dimension {params.dim} != set dimension {A.ambient_dim}")
    n = A.n_points
    if n > max_points:
        raise ResourceError(f"{n} points exceed the cap of {max_points}")
    if n > 1 and not np.all(A.nn_dist > 0):
        raise AssemblyError("duplicate points: zero nearest-neighbour distance")
    pts = A.points
    K = np.empty((n, n))
    blocks = [(lo, min(lo + _BLOCK, n)) for lo in range(0, n, _BLOCK)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: _fill_rows(K, pts, params.exponent, *b), blocks))
    else:
        for lo, hi in blocks:
            _fill_rows(K, pts, params.exponent, lo, hi)
    if spacing is not None:
        h = np.asarray(spacing, dtype=float).reshape(-1)
        if h.size != n or not np.all(np.isfinite(h) & (h > 0)):
            raise AssemblyError("spacing must be positive and finite, one value per point")
        rule = DIAG_RULE + "+given-spacing"
    elif n > 1:
        h, rule = A.nn_dist, DIAG_RULE
    else:
        raise AssemblyError("a single point needs an explicit spacing for its diagonal")
    K[np.diag_indices(n)] = (C_DIAG * h) ** params.exponent
    # exact symmetry (rows are computed independently)
    K = np.triu(K) + np.triu(K, 1).T
    K.setflags(write=False)
    return EnergyContext(params, A, K, rule)


def _weights(ctx: EnergyContext, mu) -> np.ndarray:
    w = np.asarray(getattr(mu, "weights", mu), dtype=float).reshape(-1)
    if w.size != ctx.n_points:
        raise DomainError(f"measure has {w.size} weights, context has {ctx.n_points} points")
    return w


def potential(ctx: EnergyContext, mu, eval_points) -> np.ndarray:
    """``U^mu`` at arbitrary points; support points use the diagonal rule."""
    w = _weights(ctx, mu)
    if np.any(w < 0):
        raise DomainError("potential of a measure with negative weights")
    x = np.atleast_2d(np.asarray(eval_points, dtype=float))
    Kx = kernel(ctx.params, x, ctx.points)
    hit = ~np.isfinite(Kx)
    if np.any(hit):
        rows, cols = np.nonzero(hit)
        Kx[rows, cols] = ctx.K[cols, cols]
    return Kx @ w


def potential_on_set(ctx: EnergyContext, mu) -> np.ndarray:
    return ctx.K @ _weights(ctx, mu)


def mutual_energy(ctx: EnergyContext, mu, nu) -> float:
    wm, wn = _weights(ctx, mu), _weights(ctx, nu)
    return math.fsum(wm * (ctx.K @ wn))


def energy(ctx: EnergyContext, mu) -> float:
    return mutual_energy(ctx, mu, mu)


def energy_norm(ctx: EnergyContext, mu) -> float:
    """``sqrt(I(mu))``; ``mu`` may be a signed weight vector."""
    return math.sqrt(max(energy(ctx, mu), 0.0))


def cross_potential(ctx: EnergyContext, source_points, source_weights):
    """Potential on ``ctx``'s points of an external point measure.

    Returns ``(values, coincident)`` where ``coincident`` flags source points
    that sit on a grid point (the diagonal rule is then used for that pair).
    """
    y = np.atleast_2d(np.asarray(source_points, dtype=float))
    s = np.asarray(source_weights, dtype=float).reshape(-1)
    Kx = kernel(ctx.params, ctx.points, y)
    hit = ~np.isfinite(Kx)
    if np.any(hit):
        rows, cols = np.nonzero(hit)
        Kx[rows, cols] = ctx.K[rows, rows]
    return Kx @ s, bool(np.any(hit))


def gauss_functional(ctx: EnergyContext, mu, omega) -> float:
    """``I_f(mu) = I(mu) - 2 * sum_i w_i U^omega(x_i)`` with ``f = -U^omega``.

    ``omega`` is anything with ``points`` and ``weights`` (a measure on another
    cloud, or a Dirac charge); its potential on the grid uses exact kernel
    values.
    """
    w = _weights(ctx, mu)
    pts, s = external_source(omega)
    if s.size == 0:
        return energy(ctx, w)
    b, _ = cross_potential(ctx, pts, s)
    return energy(ctx, w) - 2.0 * math.fsum(w * b)


def external_source(omega):
    """``(points, weights)`` of a measure used as a field source (may be None)."""
    if omega is None:
        return np.zeros((0, 0)), np.zeros(0)
    if hasattr(omega, "location"):
        return np.atleast_2d(np.asarray(omega.location, dtype=float)), np.array([float(omega.charge)])
    return np.atleast_2d(np.asarray(omega.points, dtype=float)), np.asarray(omega.weights, dtype=float)
