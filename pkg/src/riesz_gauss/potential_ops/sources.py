"""Potentials of field sources on a grid, and sub-grid contexts."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DomainError
from ..kernel import EnergyContext, cross_potential, external_source
from ..measures import DiracMeasure, DiscreteMeasure


def source_potential(ctx: EnergyContext, source):
    """``U^source`` at the grid points of ``ctx``.

    Returns ``(values, coincident)``.  A measure living on ``ctx.set`` uses the
    assembled matrix, so its potential is exactly the grid potential; any
    other source (a Dirac or a measure on another cloud) uses exact kernel
    values, with the diagonal rule for points that coincide with the grid.
    """
    if source is None:
        return np.zeros(ctx.n_points), False
    if isinstance(source, DiscreteMeasure) and source.set is ctx.set:
        return ctx.K @ source.weights, False
    if isinstance(source, DiscreteMeasure) and np.any(source.weights < 0):
        raise DomainError("source measure has negative weights")
    pts, s = external_source(source)
    if s.size == 0 or not np.any(s):
        return np.zeros(ctx.n_points), False
    return cross_potential(ctx, pts, s)


def source_mass(source) -> float:
    return 0.0 if source is None else float(source.mass)


def restrict_context(ctx: EnergyContext, index, label: str | None = None) -> EnergyContext:
    """Context on a subset of the grid that reuses the parent's matrix entries.

    The diagonal is inherited rather than recomputed from the sub-grid's own
    spacing, so grid potentials on the subset agree exactly with the parent's.
    """
    idx = np.asarray(index)
    if idx.dtype == bool:
        idx = np.flatnonzero(idx)
    K = np.ascontiguousarray(ctx.K[np.ix_(idx, idx)])
    K.setflags(write=False)
    sub = ctx.set.subset(idx, label)
    return EnergyContext(ctx.params, sub, K, ctx.diag_rule_id + "+inherited")


def locate_subset(inner_points: np.ndarray, outer_points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Indices into ``outer_points`` of each inner point; DomainError if one is missing."""
    d, idx = cKDTree(outer_points).query(inner_points, k=1)
    if np.any(d > tol):
        raise DomainError("first point set is not a subset of the second")
    return idx


def exclude_coincident(ctx: EnergyContext, dirac: DiracMeasure):
    """Drop the grid node sitting on ``dirac`` (if any); returns ``(ctx, kept_index)``."""
    d = np.linalg.norm(ctx.points - np.asarray(dirac.location), axis=1)
    hit = d <= 1e-9 * max(ctx.set.mesh_size, 1.0)
    if not np.any(hit):
        return ctx, np.arange(ctx.n_points)
    keep = np.flatnonzero(~hit)
    return restrict_context(ctx, keep, f"{ctx.set.label}-minus-pole"), keep
