"""Equilibrium measures, balayage and harmonic measure on a grid."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, SolverError
from ..geometry import DiscretizedSet
from ..kernel import EnergyContext, RieszParams, assemble, energy, external_source, kernel
from ..measures import DiracMeasure, DiscreteMeasure
from ..qp import QpOptions, QpProblem, solve
from .results import BalayageResult, EquilibriumResult
from .sources import exclude_coincident, locate_subset, source_mass, source_potential


def _checked(sol, what):
    if not sol.converged:
        raise SolverError(f"{what}: quadratic program did not converge", {
            "iterations": sol.iterations,
            "kkt_residual": sol.kkt_residual,
            "kkt_tol": sol.kkt_tol,
        })
    return sol


def equilibrium(ctx: EnergyContext, opts: QpOptions | None = None) -> EquilibriumResult:
    """Robin measure (unit mass, least energy) and the equilibrium measure it scales to.

    With ``W`` the least energy, the capacity is ``1/W`` and
    ``gamma = mu_robin / W`` has mass, energy and capacity all equal.
    """
    sol = _checked(solve(QpProblem(ctx.K, np.zeros(ctx.n_points), 1.0), opts), "equilibrium")
    robin = DiscreteMeasure.from_solver(ctx.set, sol.w)
    W = energy(ctx, robin)
    gamma = DiscreteMeasure(ctx.set, robin.weights / W)
    return EquilibriumResult(
        gamma=gamma,
        capacity=1.0 / W,
        robin_energy=W,
        potential_on_set=ctx.K @ gamma.weights,
        robin=robin,
        solution=sol,
        truncated=ctx.set.truncated,
        energy=energy(ctx, gamma),
    )


def capacity(ctx: EnergyContext) -> float:
    return equilibrium(ctx).capacity


def _self_energy(ctx: EnergyContext, zeta) -> float | None:
    """Discrete energy of the source, or None when it is a point charge."""
    if isinstance(zeta, DiscreteMeasure):
        if zeta.set is ctx.set:
            return energy(ctx, zeta)
        own = assemble(ctx.params, zeta.set)
        return energy(own, zeta)
    return None


def balayage(ctx: EnergyContext, zeta, opts: QpOptions | None = None, spot_checks: int = 20,
             rng: np.random.Generator | None = None) -> BalayageResult:
    """Sweep ``zeta`` onto the grid of ``ctx``.

    The swept measure is the nonnegative grid measure nearest to ``zeta`` in
    the energy norm, i.e. the solution of ``min w K w - 2 b w, w >= 0`` with
    ``b = U^zeta`` on the grid.  ``spot_checks`` random competitors whose
    potential dominates ``U^zeta`` on the support are drawn and must not have
    lower energy.
    """
    b, coincident = source_potential(ctx, zeta)
    m_before = source_mass(zeta)
    if not np.any(b):
        zero = DiscreteMeasure.zero(ctx.set)
        return BalayageResult(zero, m_before, 0.0, b.copy(), _projection(ctx, zeta, zero, b),
                              None, b, coincident)
    sol = _checked(solve(QpProblem(ctx.K, b), opts), "balayage")
    swept = DiscreteMeasure.from_solver(ctx.set, sol.w)
    ok = _min_energy_spot_check(ctx, swept, spot_checks, rng)
    return BalayageResult(
        swept=swept,
        mass_before=m_before,
        mass_after=swept.mass,
        potential_gap=b - ctx.K @ swept.weights,
        projection_distance=_projection(ctx, zeta, swept, b),
        solution=sol,
        source_potential=b,
        coincident=coincident,
        min_energy_ok=ok,
    )


def _projection(ctx, zeta, swept, b):
    e = _self_energy(ctx, zeta)
    if e is None:
        return None
    w = swept.weights
    d2 = e - 2.0 * math.fsum(w * b) + energy(ctx, swept)
    return math.sqrt(max(d2, 0.0))


def _min_energy_spot_check(ctx, swept, count, rng) -> bool:
    # competitors nu = swept + eta with eta >= 0 keep U^nu >= U^zeta on the support
    if count <= 0:
        return True
    rng = np.random.default_rng(0) if rng is None else rng
    w = swept.weights
    e0 = energy(ctx, swept)
    scale = max(float(w.max()), 1e-300)
    for _ in range(count):
        eta = np.where(rng.random(w.size) < 0.2, rng.random(w.size), 0.0) * scale
        nu = w + eta
        if energy(ctx, nu) < e0 - 1e-12 * max(e0, 1e-300):
            return False
    return True


def harmonic_measure(ctx: EnergyContext, z, opts: QpOptions | None = None,
                     exclude_pole: bool = False, **kw) -> BalayageResult:
    """Balayage of the unit Dirac at ``z``.

    A Dirac sitting on a grid node is swept onto itself.  With
    ``exclude_pole`` (meant for a cusp vertex that belongs to the grid) that
    node is removed first and the swept measure is padded back with a zero.
    """
    dirac = z if isinstance(z, DiracMeasure) else DiracMeasure(tuple(np.asarray(z, float)), 1.0)
    if not exclude_pole:
        return balayage(ctx, dirac, opts, **kw)
    sub, keep = exclude_coincident(ctx, dirac)
    res = balayage(sub, dirac, opts, **kw)
    if sub is ctx:
        return res
    full = np.zeros(ctx.n_points)
    full[keep] = res.swept.weights
    swept = DiscreteMeasure(ctx.set, full)
    b, _ = source_potential(ctx, dirac)
    return BalayageResult(swept, res.mass_before, res.mass_after, b - ctx.K @ full, None,
                          res.solution, b, True, res.min_energy_ok)


def balayage_symmetry_check(ctx: EnergyContext, zeta, sigma, opts: QpOptions | None = None) -> float:
    """Relative gap in ``I(zeta^A, sigma) = I(zeta, sigma^A)``.

    Both sides pair a swept measure with the other source's potential on the
    grid, so each needs its own projection.
    """
    bz = balayage(ctx, zeta, opts, spot_checks=0)
    bs = balayage(ctx, sigma, opts, spot_checks=0)
    left = math.fsum(bz.swept.weights * bs.source_potential) if bs.source_potential is not None else 0.0
    right = math.fsum(bs.swept.weights * bz.source_potential) if bz.source_potential is not None else 0.0
    return abs(left - right) / max(abs(left), abs(right), 1e-300)


def balayage_rest_check(ctx_A: EnergyContext, ctx_Q: EnergyContext, zeta,
                        opts: QpOptions | None = None) -> float:
    """Relative energy distance between ``zeta^A`` and ``(zeta^Q)^A`` for ``A`` inside ``Q``."""
    idx = locate_subset(ctx_A.points, ctx_Q.points)
    direct = balayage(ctx_A, zeta, opts, spot_checks=0)
    stage = balayage(ctx_Q, zeta, opts, spot_checks=0)
    b2 = (ctx_Q.K @ stage.swept.weights)[idx]
    if np.any(b2):
        sol = _checked(solve(QpProblem(ctx_A.K, b2), opts), "balayage (second stage)")
        w2 = np.maximum(sol.w, 0.0)
    else:
        w2 = np.zeros(ctx_A.n_points)
    d = direct.swept.weights - w2
    num = math.sqrt(max(energy(ctx_A, d), 0.0))
    den = math.sqrt(max(energy(ctx_A, direct.swept), 0.0))
    if den == 0.0:
        return num
    return num / den


def domination_excess(ctx: EnergyContext, zeta, swept: DiscreteMeasure, probes) -> np.ndarray:
    """``(U^{zeta^A} - U^zeta) / U^zeta`` at probe points (exact kernel values)."""
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    u_sw = kernel(ctx.params, probes, ctx.points) @ swept.weights
    pts, s = external_source(zeta)
    u_src = kernel(ctx.params, probes, pts) @ s
    return (u_sw - u_src) / np.maximum(u_src, 1e-300)


def equilibrium_of(params: RieszParams, A: DiscretizedSet, **kw) -> EquilibriumResult:
    return equilibrium(assemble(params, A, **kw))


def self_balayage_gap(ctx: EnergyContext, eq: EquilibriumResult) -> float:
    """``||(gamma)^A - gamma|| / ||gamma||``: the equilibrium measure is its own sweep."""
    bal = balayage(ctx, eq.gamma, spot_checks=0)
    d = bal.swept.weights - eq.gamma.weights
    return math.sqrt(max(energy(ctx, d), 0.0)) / math.sqrt(eq.energy)


def linearity_gap(ctx: EnergyContext, a1: float, z1: DiscreteMeasure, a2: float,
                  z2: DiscreteMeasure) -> float:
    """Energy-norm defect of ``(a1 z1 + a2 z2)^A - a1 z1^A - a2 z2^A`` relative to the sum."""
    if z1.set is not z2.set:
        raise DomainError("linearity check needs both sources on one cloud")
    comb = DiscreteMeasure(z1.set, a1 * z1.weights + a2 * z2.weights)
    s = balayage(ctx, comb, spot_checks=0).swept.weights
    parts = (a1 * balayage(ctx, z1, spot_checks=0).swept.weights
             + a2 * balayage(ctx, z2, spot_checks=0).swept.weights)
    num = math.sqrt(max(energy(ctx, s - parts), 0.0))
    return num / max(math.sqrt(max(energy(ctx, s), 0.0)), 1e-300)


def idempotence_gap(ctx: EnergyContext, bal: BalayageResult) -> float:
    again = balayage(ctx, bal.swept, spot_checks=0).swept.weights
    d = again - bal.swept.weights
    return math.sqrt(max(energy(ctx, d), 0.0)) / max(math.sqrt(max(energy(ctx, bal.swept), 0.0)), 1e-300)


__all__ = [
    "equilibrium", "capacity", "balayage", "harmonic_measure", "balayage_symmetry_check",
    "balayage_rest_check", "domination_excess", "equilibrium_of", "self_balayage_gap",
    "linearity_gap", "idempotence_gap",
]
