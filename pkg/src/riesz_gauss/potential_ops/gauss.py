"""The Gauss variational problem with external field ``f = -U^omega``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, PreconditionError
from ..kernel import EnergyContext, energy
from ..measures import DiscreteMeasure
from ..qp import QpOptions, QpProblem, solve
from .balayage import _checked, balayage, equilibrium
from .results import BalayageResult, EquilibriumResult, GaussSolution, Verdict
from .sources import source_potential


def solve_gauss(ctx: EnergyContext, omega=None, total_mass: float = 1.0,
                opts: QpOptions | None = None) -> GaussSolution:
    """Minimise ``I(mu) - 2 int U^omega dmu`` over measures of mass ``total_mass`` on the grid.

    ``c_const`` is read off the mass multiplier; ``c_mean`` recomputes it as
    the weight-averaged ``U^lambda - U^omega`` over the support.
    """
    b, coincident = source_potential(ctx, omega)
    sol = _checked(solve(QpProblem(ctx.K, b, total_mass), opts), "gauss")
    lam = DiscreteMeasure.from_solver(ctx.set, sol.w)
    r = ctx.K @ lam.weights - b
    w = lam.weights
    c_mean = math.fsum(w * r) / math.fsum(w)
    return GaussSolution(
        lam=lam,
        c_const=float(sol.multiplier),
        c_mean=c_mean,
        w_value=energy(ctx, lam) - 2.0 * math.fsum(w * b),
        kkt_residual=sol.kkt_residual,
        kkt_tol=sol.kkt_tol,
        weighted_potential=r,
        field_potential=b,
        ctx=ctx,
        solution=sol,
        coincident=coincident,
    )


@dataclass(frozen=True)
class SolvabilityVerdict:
    verdict: str
    branch: str
    radii: tuple
    capacities: tuple
    swept_masses: tuple
    increments: tuple

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "branch": self.branch,
            "radii": list(self.radii),
            "capacities": list(self.capacities),
            "swept_masses": list(self.swept_masses),
            "increments_per_doubling": list(self.increments),
        }


@dataclass(frozen=True)
class SolvabilityThresholds:
    stable_increment: float = 0.05
    divergent_increment: float = 0.20
    mass_ok: float = 0.02
    mass_short: float = 0.05


def per_doubling(c1: float, c2: float, r1, r2) -> float:
    """Relative capacity increment normalised to one doubling of the truncation radius."""
    if r1 is None or r2 is None or r2 == r1:
        return c2 / c1 - 1.0
    return (c2 / c1) ** (1.0 / math.log2(r2 / r1)) - 1.0


def classify_solvability(ctx_sequence, omega, equilibria=None, sweeps=None,
                         thresholds: SolvabilityThresholds | None = None) -> SolvabilityVerdict:
    """Decide existence of the minimiser from a ladder of growing truncations.

    The minimiser exists when the capacity stays finite or the swept field
    source has mass at least one.  Capacity is declared finite when the last
    increment per doubling is below ``stable_increment`` and divergent when
    it exceeds ``divergent_increment``.
    """
    th = thresholds or SolvabilityThresholds()
    ctxs = list(ctx_sequence)
    if len(ctxs) < 3:
        raise ConfigurationError("solvability needs at least 3 truncations")
    eqs = equilibria or [equilibrium(c) for c in ctxs]
    bals = sweeps or [balayage(c, omega, spot_checks=0) for c in ctxs]
    radii = tuple(c.set.truncation_radius for c in ctxs)
    caps = tuple(e.capacity for e in eqs)
    masses = tuple(b.mass_after for b in bals)
    incs = tuple(per_doubling(caps[k], caps[k + 1], radii[k], radii[k + 1]) for k in range(len(caps) - 1))
    inc, m = incs[-1], masses[-1]
    if inc < th.stable_increment:
        verdict, branch = "solvable", "finite_capacity"
    elif m >= 1.0 - th.mass_ok:
        verdict, branch = "solvable", "swept_mass"
    elif inc > th.divergent_increment and m <= 1.0 - th.mass_short:
        verdict, branch = "unsolvable", "infinite_capacity_and_mass_deficit"
    else:
        verdict, branch = "inconclusive", "between_thresholds"
    return SolvabilityVerdict(verdict, branch, radii, caps, masses, incs)


def representation_check(gauss: GaussSolution, bal: BalayageResult, eq: EquilibriumResult,
                         infinite_capacity: bool = False, mass_tol: float = 1e-6) -> float:
    """``||lambda - (omega^A + c gamma)|| / ||lambda||``; ``c`` is dropped for infinite capacity."""
    if bal.mass_after > 1.0 + mass_tol:
        raise PreconditionError(
            f"representation needs swept mass <= 1, got {bal.mass_after:.6g}")
    c = 0.0 if infinite_capacity else gauss.c_const
    d = gauss.lam.weights - bal.swept.weights - c * eq.gamma.weights
    ctx = gauss.ctx
    return math.sqrt(max(energy(ctx, d), 0.0)) / math.sqrt(energy(ctx, gauss.lam))


def default_tol_c(gauss: GaussSolution) -> float:
    return 1e-4 * gauss.field_scale


def sign_trichotomy_check(gauss: GaussSolution, swept_mass: float, delta: float = 0.02,
                          tol_c: float | None = None) -> Verdict:
    """Compare the sign of the equilibrium constant with ``1 - swept_mass``.

    Expected: positive below ``1 - delta``, negative above ``1 + delta``,
    near zero in between.  A sign that the tolerance cannot resolve while the
    swept mass lies within ``2 * delta`` of one is reported as inconclusive.
    """
    tol_c = default_tol_c(gauss) if tol_c is None else tol_c
    c = gauss.c_const
    if swept_mass < 1.0 - delta:
        expected, ok = "positive", c > tol_c
    elif swept_mass > 1.0 + delta:
        expected, ok = "negative", c < -tol_c
    else:
        expected, ok = "zero", abs(c) <= tol_c
    vals = {"c_const": c, "swept_mass": swept_mass, "tol_c": tol_c, "expected": expected}
    if ok:
        return Verdict("pass", f"c is {expected}", vals)
    if expected != "zero" and abs(c) <= tol_c and abs(swept_mass - 1.0) <= 2.0 * delta:
        return Verdict("inconclusive", "sign not resolved near swept mass one", vals)
    return Verdict("fail", f"expected c {expected}, got {c:.6g}", vals)


@dataclass(frozen=True)
class DualFieldReport:
    max_gap: float
    at_swept_gap: float
    minimiser_ok: bool
    worst_gain: float

    def summary(self) -> dict:
        return {"max_gap": self.max_gap, "at_swept_gap": self.at_swept_gap,
                "minimiser_ok": self.minimiser_ok, "worst_gain": self.worst_gain}


def dual_field_check(ctx: EnergyContext, omega, samples, n_perturb: int = 50,
                     rng: np.random.Generator | None = None,
                     bal: BalayageResult | None = None) -> DualFieldReport:
    """Compare the functional of ``f = -U^omega`` with that of ``f~ = -U^{omega^A}``.

    Returns the largest relative gap ``|I_f - I_f~| / (1 + |I_f|)`` over the
    samples, the gap at ``omega^A`` itself (both equal ``-||omega^A||^2``),
    and whether ``omega^A`` beats ``n_perturb`` random nonnegative competitors
    for the unconstrained-mass functional.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    bal = bal or balayage(ctx, omega, spot_checks=0)
    b = bal.source_potential if bal.source_potential is not None else np.zeros(ctx.n_points)
    wa = bal.swept.weights
    b_dual = ctx.K @ wa

    def both(w):
        e = energy(ctx, w)
        return e - 2.0 * math.fsum(w * b), e - 2.0 * math.fsum(w * b_dual)

    gaps = []
    for mu in samples:
        w = np.asarray(getattr(mu, "weights", mu), dtype=float)
        f1, f2 = both(w)
        gaps.append(abs(f1 - f2) / (1.0 + abs(f1)))
    f1, f2 = both(wa)
    at = max(abs(f1 - f2), abs(f1 + energy(ctx, wa))) / (1.0 + abs(f1))
    base = f1
    scale = max(float(wa.max()) if wa.size else 0.0, 1e-300)
    worst = -math.inf
    for _ in range(n_perturb):
        w = np.maximum(wa + scale * 0.1 * rng.standard_normal(wa.size), 0.0)
        gain = base - both(w)[0]
        worst = max(worst, gain)
    ok = worst <= 1e-12 * (1.0 + abs(base))
    return DualFieldReport(max(gaps) if gaps else 0.0, at, bool(ok), float(worst))
