"""Convex quadratic programs over the nonnegative orthant and the scaled simplex.

Both problems minimise ``w @ K @ w - 2 * b @ w`` with ``K`` symmetric positive
definite:

* (P1) subject to ``w >= 0`` (projection onto a cone, used for balayage);
* (P2) subject to ``w >= 0`` and ``sum(w) == m`` (Gauss and Robin problems).

:func:`solve` is a primal active-set method.  Each iteration minimises the
objective exactly on the current face with a Cholesky factorisation, then
either accepts the face minimiser, accepts its projection when that lowers
the objective, or backtracks to the first blocking bound.  The objective is
therefore non-increasing from one iterate to the next.  :func:`oracle_solve`
enumerates every support set and is meant for cross-checking small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DomainError, ResourceError, SolverError

ORACLE_MAX_N = 16


@dataclass(frozen=True)
class QpProblem:
    """``min w K w - 2 b w`` over ``w >= 0`` (and ``sum w = mass`` if given)."""

    K: np.ndarray
    b: np.ndarray
    mass: float | None = None

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != b.size:
            raise DomainError(f"shape mismatch: K {K.shape}, b {b.shape}")
        if self.mass is not None and not self.mass > 0:
            raise DomainError(f"mass constraint must be positive, got {self.mass}")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.size

    def objective(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(w @ (self.K @ w) - 2.0 * (self.b @ w))


@dataclass(frozen=True)
class QpOptions:
    kkt_rel: float = 1e-7
    add_rel: float = 1e-11
    max_iter: int = 1000


@dataclass(frozen=True)
class QpSolution:
    w: np.ndarray
    objective: float
    multiplier: float
    kkt_residual: float
    kkt_tol: float
    iterations: int
    converged: bool
    history: tuple = field(default=(), repr=False)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.w > 0)


def kkt_scale(p: QpProblem, w) -> float:
    """Magnitude used to turn relative KKT tolerances into absolute ones."""
    wmax = float(np.max(w)) if np.size(w) else 0.0
    if wmax <= 0.0:
        bpos = np.maximum(p.b, 0.0)
        wmax = float(np.max(bpos / np.diag(p.K))) if p.n else 0.0
    return float(np.max(np.abs(p.K))) * wmax


def kkt_residual(p: QpProblem, w, multiplier: float = 0.0) -> float:
    """Largest violation of the complementarity system at ``w``.

    With ``r = K w - b`` and ``c`` the mass multiplier (zero for P1) this is
    ``max(max_i (c - r_i), max_{w_i > 0} |r_i - c|, 0)``.
    """
    w = np.asarray(w, dtype=float)
    r = p.K @ w - p.b - multiplier
    worst = max(0.0, float(np.max(-r))) if p.n else 0.0
    on = w > 0
    if np.any(on):
        worst = max(worst, float(np.max(np.abs(r[on]))))
    return worst


def _face_minimiser(p: QpProblem, idx: np.ndarray):
    """Exact minimiser on ``{w_i = 0, i not in idx}`` (plus the mass row)."""
    Kf = p.K[np.ix_(idx, idx)]
    try:
        cf = linalg.cho_factor(Kf, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SolverError("kernel block is not positive definite",
                          {"face_size": int(idx.size)}) from exc
    u = linalg.cho_solve(cf, p.b[idx], check_finite=False)
    if p.mass is None:
        return u, 0.0
    v = linalg.cho_solve(cf, np.ones(idx.size), check_finite=False)
    c = (p.mass - u.sum()) / v.sum()
    return u + c * v, float(c)


def _project_simplex(z: np.ndarray, mass: float) -> np.ndarray:
    # sort-based Euclidean projection onto {w >= 0, sum w = mass}
    s = np.sort(z)[::-1]
    css = np.cumsum(s) - mass
    k = np.arange(1, z.size + 1)
    rho = np.nonzero(s - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(z - theta, 0.0)


def _start(p: QpProblem) -> np.ndarray:
    if p.mass is None:
        return np.zeros(p.n)
    return np.full(p.n, p.mass / p.n)


def solve(p: QpProblem, opts: QpOptions | None = None, w0=None) -> QpSolution:
    """Solve (P1) or (P2) to KKT accuracy ``opts.kkt_rel * scale``.

    ``w0`` must be feasible when given; by default (P1) starts from zero with
    every index of positive ``b`` free and (P2) from the uniform vector.
    A run that exhausts ``max_iter`` returns ``converged=False``.
    """
    opts = opts or QpOptions()
    n = p.n
    if n == 0:
        raise DomainError("empty problem")
    w = _start(p) if w0 is None else np.array(w0, dtype=float)
    if np.any(w < 0):
        raise DomainError("starting point must be nonnegative")
    if p.mass is not None and abs(w.sum() - p.mass) > 1e-12 * p.mass:
        raise DomainError("starting point violates the mass constraint")

    free = w > 0
    if p.mass is None and w0 is None:
        free = p.b > 0
    obj = p.objective(w)
    history = [obj]
    c = 0.0
    single = False
    it = 0
    converged = False
    while it < opts.max_iter:
        it += 1
        idx = np.flatnonzero(free)
        z_full = np.zeros(n)
        c = 0.0
        if idx.size:
            z, c = _face_minimiser(p, idx)
            z_full[idx] = z
        bad = idx[z_full[idx] <= 0]
        if bad.size:
            stuck = bad[w[bad] <= 0]
            if stuck.size:
                # freed indices that want to go negative: drop them in place
                # and fall back to adding one index at a time
                free[stuck] = False
                single = True
                continue
            if p.mass is None:
                cand = np.maximum(z_full, 0.0)
            else:
                cand = np.zeros(n)
                cand[idx] = _project_simplex(z_full[idx], p.mass)
            cand_obj = p.objective(cand)
            if cand_obj < obj - 1e-15 * abs(obj):
                w = cand
            else:
                # backtrack to the first blocking bound
                d = z_full - w
                steps = w[bad] / (w[bad] - z_full[bad])
                t = float(np.min(steps))
                w = w + t * d
                w[bad[steps <= t * (1.0 + 1e-12)]] = 0.0
                w = np.maximum(w, 0.0)
                if p.mass is not None:
                    w *= p.mass / w.sum()
            obj = p.objective(w)
            history.append(obj)
            free = w > 0
            continue

        w = z_full
        obj = p.objective(w)
        history.append(obj)
        free = w > 0
        r = p.K @ w - p.b - c
        scale = kkt_scale(p, w)
        viol = np.flatnonzero(~free & (r < -opts.add_rel * scale))
        if viol.size == 0:
            converged = True
            break
        if single:
            viol = viol[[int(np.argmin(r[viol]))]]
            single = False
        free[viol] = True

    scale = kkt_scale(p, w)
    res = kkt_residual(p, w, c)
    tol = opts.kkt_rel * scale
    return QpSolution(
        w=w,
        objective=p.objective(w),
        multiplier=c,
        kkt_residual=res,
        kkt_tol=tol,
        iterations=it,
        converged=bool(converged and res <= tol),
        history=tuple(history),
    )


def oracle_solve(p: QpProblem) -> QpSolution:
    """Enumerate all support sets; return the unique KKT point."""
    n = p.n
    if n > ORACLE_MAX_N:
        raise ResourceError(f"oracle_solve limited to N <= {ORACLE_MAX_N}, got {n}")
    best = None
    for size in range(0 if p.mass is None else 1, n + 1):
        for support in itertools.combinations(range(n), size):
            idx = np.array(support, dtype=int)
            w = np.zeros(n)
            c = 0.0
            if size:
                Kf = p.K[np.ix_(idx, idx)]
                u = np.linalg.solve(Kf, p.b[idx])
                if p.mass is not None:
                    v = np.linalg.solve(Kf, np.ones(size))
                    c = (p.mass - u.sum()) / v.sum()
                    u = u + c * v
                if np.any(u <= 0):
                    continue
                w[idx] = u
            r = p.K @ w - p.b - c
            scale = max(kkt_scale(p, w), 1e-300)
            out = np.ones(n, dtype=bool)
            out[idx] = False
            if np.any(r[out] < -1e-9 * scale):
                continue
            obj = p.objective(w)
            if best is None or obj < best[0]:
                best = (obj, w, c)
    if best is None:
        raise SolverError("no KKT point found by enumeration")
    obj, w, c = best
    res = kkt_residual(p, w, c)
    return QpSolution(w=w, objective=obj, multiplier=float(c), kkt_residual=res,
                      kkt_tol=1e-7 * kkt_scale(p, w), iterations=1, converged=True)


def projection_residual(p: QpProblem, w) -> float:
    """Energy-norm distance from ``sigma = K^{-1} b`` to the measure ``w``."""
    if p.mass is not None:
        raise DomainError("projection_residual applies to (P1) instances only")
    w = np.asarray(w, dtype=float)
    sigma = linalg.cho_solve(linalg.cho_factor(p.K, lower=True), p.b)
    d = sigma - w
    return float(np.sqrt(max(d @ (p.K @ d), 0.0)))
