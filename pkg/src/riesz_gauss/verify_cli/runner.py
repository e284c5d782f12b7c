"""Scenario execution: one method per check identifier, shared ladders cached."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..errors import AssemblyError, PreconditionError, ResourceError, SolverError
from ..geometry import DiscretizedSet, build_set, parse_shape
from ..kernel import DEFAULT_MAX_POINTS, RieszParams, assemble, kernel
from ..measures import DiracMeasure, DiscreteMeasure, read_measure_csv, scale, support_points
from ..potential_ops import (
    balayage,
    balayage_symmetry_check,
    classify_solvability,
    domination_excess,
    dual_field_check,
    equilibrium,
    harmonic_measure,
    idempotence_gap,
    kelvin_equilibrium_check,
    kelvin_potential_error,
    linearity_gap,
    representation_check,
    sign_trichotomy_check,
    solve_gauss,
    support_report,
    theorem_ap_suite,
    truncation_center,
    wiener_series,
)
from ..potential_ops.gauss import SolvabilityThresholds
from ..potential_ops.suites import LadderStep, scaled_sweep
from ..qp import QpOptions, QpProblem, oracle_solve, solve
from .config import ScenarioConfig, resolved_radius_auto

PASS, FAIL, INCONCLUSIVE, ERROR = "pass", "fail", "inconclusive", "error"


@dataclass
class Table:
    header: list
    rows: list = field(default_factory=list)

    def add(self, *row):
        self.rows.append(list(row))


@dataclass
class CheckResult:
    verdict: str
    detail: str
    values: dict
    tables: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "detail": self.detail, "values": self.values}


def combine(states) -> str:
    states = set(states)
    if ERROR in states:
        return ERROR
    if FAIL in states:
        return FAIL
    if INCONCLUSIVE in states:
        return INCONCLUSIVE
    return PASS


def _status(ok: bool, inconclusive: bool = False) -> str:
    return PASS if ok else (INCONCLUSIVE if inconclusive else FAIL)


def _decreasing(values, floor) -> bool:
    return all(b < a or b <= floor for a, b in zip(values, values[1:]))


class Runner:
    """Runs the checks of one scenario; contexts and solves are shared between checks."""

    def __init__(self, cfg: ScenarioConfig, max_points: int = DEFAULT_MAX_POINTS, threads: int = 1):
        self.cfg = cfg
        self.max_points = max_points
        self.threads = threads
        self.opts = QpOptions(kkt_rel=cfg.tol("kkt_rel"))
        self._ctx, self._eq, self._sweep, self._gauss, self._harm = {}, {}, {}, {}, {}
        self._omega_unit = None

    # ------------------------------------------------------------ plumbing

    def rng(self, check: str) -> np.random.Generator:
        """Generator for one check, derived from the scenario seed and the check name."""
        return np.random.default_rng([self.cfg.seed, zlib.crc32(check.encode())])

    @property
    def unbounded(self) -> bool:
        return not parse_shape(self.cfg.shape).bounded

    def refinement_keys(self):
        t = self.cfg.truncations[0] if self.unbounded else None
        return [(r, t) for r in self.cfg.resolutions]

    def truncation_keys(self):
        return [(self.cfg.resolutions[-1], R) for R in self.cfg.truncations]

    def ladder_keys(self):
        return self.truncation_keys() if self.unbounded else self.refinement_keys()

    def ctx(self, key):
        if key not in self._ctx:
            A = build_set(self.cfg.shape, key[0], key[1])
            self._ctx[key] = assemble(self.cfg.params, A, self.max_points, self.threads)
        return self._ctx[key]

    def eq(self, key):
        if key not in self._eq:
            self._eq[key] = equilibrium(self.ctx(key), self.opts)
        return self._eq[key]

    def omega_unit(self):
        if self._omega_unit is None:
            om = self.cfg.omega
            if om["type"] == "dirac":
                self._omega_unit = DiracMeasure(tuple(om["location"]), 1.0)
            elif om["type"] == "measure_file":
                self._omega_unit = read_measure_csv(om["path"], self.cfg.params.dim)
        return self._omega_unit

    def omega(self, q: float):
        unit = self.omega_unit()
        if isinstance(unit, DiracMeasure):
            return DiracMeasure(unit.location, q)
        return scale(unit, q)

    def sweep(self, key, q: float = 1.0):
        """Balayage of ``q * omega_unit`` (computed once for ``q = 1`` and rescaled)."""
        if key not in self._sweep:
            self._sweep[key] = balayage(self.ctx(key), self.omega_unit(), self.opts, spot_checks=0)
        base = self._sweep[key]
        return base if q == 1.0 else scaled_sweep(base, q)

    def harmonic(self, key, z):
        k = (key, tuple(float(c) for c in z))
        if k not in self._harm:
            self._harm[k] = harmonic_measure(self.ctx(key), z, self.opts, spot_checks=0)
        return self._harm[k]

    def gauss(self, key, q: float):
        k = (key, float(q))
        if k not in self._gauss:
            self._gauss[k] = solve_gauss(self.ctx(key), self.omega(q), 1.0, self.opts)
        return self._gauss[k]

    def _extent(self, A):
        c = A.points.mean(axis=0)
        return c, float(np.max(np.linalg.norm(A.points - c, axis=1)))

    def _exterior_points(self, A, count, rng, lo=1.5, hi=3.0):
        c, rho = self._extent(A)
        d = rng.standard_normal((count, A.ambient_dim))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        return c + d * (rho * rng.uniform(lo, hi, count))[:, None]

    def run(self, check: str) -> CheckResult:
        try:
            return getattr(self, f"check_{check}")()
        except (SolverError, AssemblyError, ResourceError) as exc:
            diag = dict(getattr(exc, "diagnostics", None) or {})
            return CheckResult(ERROR, f"{type(exc).__name__}: {exc}", {"diagnostics": diag})

    # -------------------------------------------------------------- checks

    def _analytic_capacity(self):
        a = self.cfg.option("equilibrium", "analytic_capacity")
        if a is None:
            return None
        if a != "auto":
            return float(a)
        spec, p = self.cfg.shape, self.cfg.params
        if spec.get("type") in ("ball", "sphere") and p.alpha == 2.0 and p.dim >= 3:
            return float(spec["radius"]) ** (p.dim - 2)
        return None

    def check_equilibrium(self) -> CheckResult:
        cfg = self.cfg
        exact = self._analytic_capacity()
        tab = Table(["resolution", "truncation_radius", "n_points", "capacity", "analytic_capacity",
                     "rel_error", "triple_gap", "max_potential_dev_on_support"])
        triple, dev_ok, errors = [], True, []
        for key in self.ladder_keys():
            e = self.eq(key)
            on = e.gamma.weights > 0
            dev = float(np.max(np.abs(e.potential_on_set[on] - 1.0)))
            dev_ok &= dev <= e.potential_tol
            err = abs(e.capacity - exact) / exact if exact else None
            errors.append(err)
            triple.append(e.triple_gap)
            tab.add(key[0], key[1], e.gamma.set.n_points, e.capacity, exact, err, e.triple_gap, dev)
        ok = max(triple) <= cfg.tol("triple_identity") and dev_ok
        vals = {"max_triple_gap": max(triple), "potential_on_support_ok": bool(dev_ok),
                "capacities": [r[3] for r in tab.rows]}
        if exact is not None:
            trend = len(errors) < 2 or errors[-1] < errors[0]
            ok &= errors[-1] <= cfg.tol("capacity_error") and trend
            vals.update(analytic_capacity=exact, rel_errors=errors, error_decreases=trend)
        return CheckResult(_status(ok), "equilibrium identities and capacity ladder", vals,
                           {"capacity_ladder": tab})

    def check_balayage(self) -> CheckResult:
        cfg, rng = self.cfg, self.rng("balayage")
        q = cfg.charges[0]
        zeta = self.omega(q)
        n_harm = int(cfg.option("balayage", "harmonic_probes", 0))
        n_dom = int(cfg.option("balayage", "domination_probes", 200))
        n_lin = int(cfg.option("balayage", "linearity_pairs", 3))
        tab = Table(["resolution", "truncation_radius", "mass_before", "mass_after",
                     "max_gap_on_support", "idempotence", "linearity", "domination_excess",
                     "harmonic_mass_gap"])
        ok, vals = True, {"charge": q, "steps": []}
        for key in self.ladder_keys():
            ctx = self.ctx(key)
            bal = balayage(ctx, zeta, self.opts, spot_checks=20, rng=rng)
            on = bal.swept.weights > 0
            gap = float(np.max(np.abs(bal.potential_gap[on]))) if np.any(on) else 0.0
            gap_tol = bal.solution.kkt_tol if bal.solution is not None else 0.0
            mono = bal.mass_after - bal.mass_before
            idem = idempotence_gap(ctx, bal)
            lin = self._linearity(ctx, rng, n_lin) if not self.unbounded else None
            dom = self._domination(ctx, zeta, bal, rng, n_dom) if not self.unbounded else None
            harm = self._harmonic_identity(key, rng, n_harm) if n_harm and not self.unbounded else None
            step_ok = (mono <= cfg.tol("mass_monotonicity") * max(1.0, bal.mass_before)
                       and gap <= gap_tol and idem <= cfg.tol("idempotence") and bal.min_energy_ok
                       and (lin is None or lin <= cfg.tol("linearity"))
                       and (dom is None or dom <= cfg.tol("domination"))
                       and (harm is None or harm <= cfg.tol("harmonic_mass")))
            ok &= step_ok
            vals["steps"].append({"resolution": key[0], "truncation_radius": key[1], **bal.summary(),
                                  "mass_excess": mono, "gap_tol": gap_tol, "idempotence": idem,
                                  "linearity": lin, "domination_excess": dom,
                                  "harmonic_mass_gap": harm, "ok": bool(step_ok)})
            tab.add(key[0], key[1], bal.mass_before, bal.mass_after, gap, idem, lin, dom, harm)
        return CheckResult(_status(ok), "balayage laws on the grid ladder", vals, {"balayage": tab})

    def _linearity(self, ctx, rng, pairs):
        if pairs <= 0:
            return None
        pts = self._exterior_points(ctx.set, 12, rng, 1.2, 2.5)
        cloud = DiscretizedSet(pts, np.ones(len(pts)), np.zeros(len(pts), bool), ctx.set.ambient_dim)
        worst = 0.0
        for _ in range(pairs):
            z1 = DiscreteMeasure(cloud, rng.random(len(pts)))
            z2 = DiscreteMeasure(cloud, rng.random(len(pts)))
            worst = max(worst, linearity_gap(ctx, rng.uniform(0.1, 2), z1, rng.uniform(0.1, 2), z2))
        return worst

    def _domination(self, ctx, zeta, bal, rng, count):
        # probes at least two mesh widths away from the grid and from the source
        c, rho = self._extent(ctx.set)
        cand = c + rng.uniform(-3 * rho, 3 * rho, (4 * count, ctx.set.ambient_dim))
        h = 2.0 * ctx.set.mesh_size
        far = cKDTree(ctx.points).query(cand)[0] >= h
        far &= cKDTree(np.atleast_2d(zeta.points)).query(cand)[0] >= h
        probes = cand[far][:count]
        if probes.size == 0:
            return None
        return float(np.max(domination_excess(ctx, zeta, bal.swept, probes)))

    def _harmonic_identity(self, key, rng, count):
        ctx, e = self.ctx(key), self.eq(key)
        worst = 0.0
        for z in self._exterior_points(ctx.set, count, rng, 1.3, 3.0):
            m = harmonic_measure(ctx, z, self.opts, spot_checks=0).mass_after
            u = float((kernel(ctx.params, z[None, :], ctx.points) @ e.gamma.weights)[0])
            worst = max(worst, abs(m - u) / u)
        return worst

    def check_gauss(self) -> CheckResult:
        cfg = self.cfg
        tab = Table(["resolution", "truncation_radius", "q", "c_const", "c_mean", "kkt_tol",
                     "min_excess", "max_dev_on_support", "cc_residual"])
        ok, steps = True, []
        for key in self.ladder_keys():
            for q in cfg.charges:
                g = self.gauss(key, q)
                rep = g.kkt_report()
                step_ok = (rep["lower_ok"] and rep["support_ok"] and rep["estimates_agree"]
                           and g.cc_residual <= g.kkt_tol)
                ok &= step_ok
                steps.append({"resolution": key[0], "truncation_radius": key[1], "q": q,
                              **g.summary(), **rep, "ok": bool(step_ok)})
                tab.add(key[0], key[1], q, g.c_const, g.c_mean, g.kkt_tol, rep["min_excess"],
                        rep["max_dev_on_support"], g.cc_residual)
        vals = {"steps": steps}
        oracle = cfg.option("gauss", "oracle")
        if oracle is not None:
            o = oracle_crosscheck(self.rng("gauss.oracle"), int(oracle.get("instances", 200)),
                                  int(oracle.get("min_n", 3)), int(oracle.get("max_n", 10)), self.opts)
            o_ok = o["max_objective_gap"] <= cfg.tol("oracle_objective") and \
                o["max_knorm_gap"] <= cfg.tol("oracle_knorm")
            ok &= o_ok
            vals["oracle"] = {**o, "ok": bool(o_ok)}
        return CheckResult(_status(ok), "KKT conditions of the Gauss problem", vals,
                           {"gauss_constants": tab})

    def check_trichotomy(self) -> CheckResult:
        cfg = self.cfg
        tab = Table(["q", "resolution", "truncation_radius", "c_const", "tol_c", "swept_mass",
                     "expected", "status"])
        per_q, states = [], []
        for q in cfg.charges:
            verdicts = []
            for key in self.ladder_keys()[-2:]:
                g = self.gauss(key, q)
                swept = self.sweep(key, q).mass_after
                v = sign_trichotomy_check(g, swept, cfg.tol("sign_delta"), cfg.tol("tol_c_rel") * g.field_scale)
                verdicts.append(v)
                tab.add(q, key[0], key[1], g.c_const, v.values["tol_c"], swept, v.values["expected"], v.status)
            stable = len({v.values["expected"] for v in verdicts}) == 1
            st = combine(v.status for v in verdicts)
            if st == PASS and not stable:
                st = FAIL
            states.append(st)
            per_q.append({"q": q, "status": st, "stable": stable,
                          "steps": [{"status": v.status, "detail": v.detail, **v.values} for v in verdicts]})
        return CheckResult(combine(states), "sign of the equilibrium constant vs swept mass",
                           {"charges": per_q}, {"trichotomy": tab})

    def check_representation(self) -> CheckResult:
        cfg = self.cfg
        key = self.ladder_keys()[-1]
        e, base = self.eq(key), self.sweep(key).mass_after
        tol = cfg.tol("representation")
        cases = [("configured", q, False) for q in cfg.charges]
        target = cfg.option("representation", "scaled_mass")
        if target is not None:
            cases.append((f"swept_mass={target}", float(target) / base, False))
        if cfg.option("representation", "unit_mass", True):
            cases.append(("swept_mass=1", 1.0 / base, True))
        tab = Table(["case", "q", "swept_mass", "c_const", "residual", "status"])
        rows, states = [], []
        for label, q, unit in cases:
            g, bal = self.gauss(key, q), self.sweep(key, q)
            try:
                res = representation_check(g, bal, e, infinite_capacity=unit)
                st = _status(res <= tol)
            except PreconditionError as exc:
                if label == "configured":
                    # the relation only covers swept mass at most one
                    rows.append({"case": label, "q": q, "status": "skipped", "detail": str(exc)})
                    continue
                res, st = None, FAIL
            states.append(st)
            rows.append({"case": label, "q": q, "swept_mass": bal.mass_after, "c_const": g.c_const,
                         "residual": res, "tol": tol, "status": st})
            tab.add(label, q, bal.mass_after, g.c_const, res, st)
        return CheckResult(combine(states) if states else INCONCLUSIVE,
                           "minimiser vs swept source plus multiple of equilibrium measure",
                           {"resolution": key[0], "truncation_radius": key[1], "cases": rows},
                           {"representation": tab})

    def check_kelvin(self) -> CheckResult:
        cfg, rng = self.cfg, self.rng("kelvin")
        z = np.asarray(cfg.option("kelvin", "center"), dtype=float)
        n_probe = int(cfg.option("kelvin", "probes", 20))
        keys = self.refinement_keys()
        tab = Table(["resolution", "n_points", "distance", "mass_harmonic", "mass_kelvin", "mass_gap"])
        reports = []
        for key in keys:
            A = self.ctx(key).set
            r = kelvin_equilibrium_check(A, z, cfg.params, max_points=self.max_points, threads=self.threads)
            reports.append(r)
            tab.add(key[0], r.n_points, r.distance, r.mass_harmonic, r.mass_kelvin, r.mass_gap)
        A0 = self.ctx(keys[0]).set
        c, rho = self._extent(A0)
        probes = c + rng.uniform(-3 * rho, 3 * rho, (4 * n_probe, A0.ambient_dim))
        probes = probes[np.linalg.norm(probes - z, axis=1) > 1e-3 * rho][:n_probe]
        pot_err = kelvin_potential_error(self.eq(keys[0]).gamma, z, cfg.params, probes)
        dists = [r.distance for r in reports]
        decreasing = _decreasing(dists, cfg.tol("refinement_floor"))
        ok = (pot_err <= cfg.tol("kelvin_potential") and dists[0] <= cfg.tol("kelvin_distance")
              and decreasing and max(r.mass_gap for r in reports) <= cfg.tol("kelvin_mass"))
        vals = {"center": z.tolist(), "potential_error": pot_err, "probes": int(len(probes)),
                "distances": dists, "distance_decreases": decreasing,
                "mass_gaps": [r.mass_gap for r in reports]}
        return CheckResult(_status(ok), "Kelvin transform identities", vals, {"kelvin_refinement": tab})

    def check_wiener(self) -> CheckResult:
        cfg = self.cfg
        w = cfg.options.get("wiener", {})
        res = cfg.resolutions[-1]
        trunc = cfg.truncations[-1] if self.unbounded else None
        cases = w.get("cases") or [{"label": cfg.name, "shape": cfg.shape, "expect": w.get("expect")}]
        min_shells = int(w.get("min_shells", 0))
        out, states, tables = [], [], {}
        for i, case in enumerate(cases):
            label = str(case.get("label", f"case{i}"))
            spec = case["shape"]
            A = build_set(spec, res, trunc if not parse_shape(spec).bounded else None)
            rr = w.get("resolved_radius")
            rr = resolved_radius_auto(spec) if rr == "auto" else rr
            center = w.get("center") or truncation_center(spec).tolist()
            rep = wiener_series(A, center, w["mode"], float(w["ratio"]), cfg.params,
                                max_shells=int(w.get("max_shells", 40)),
                                via_inversion=bool(w.get("via_inversion", False)),
                                resolved_radius=rr, decay_ratio=cfg.tol("wiener_decay"),
                                floor=cfg.tol("wiener_floor"), max_points=self.max_points)
            expect = case.get("expect")
            if rep.verdict == "inconclusive":
                st = INCONCLUSIVE
            else:
                st = _status((expect is None or rep.verdict == expect) and rep.shells_used >= min_shells)
            states.append(st)
            out.append({"label": label, "expect": expect, "status": st, "resolved_radius": rr,
                        **rep.summary(), "terms": list(rep.terms)})
            tab = Table(["shell", "term", "partial_sum"])
            for j, t, s in zip(rep.shell_indices, rep.terms, rep.partial_sums):
                tab.add(j, t, s)
            tables[f"wiener_{label}"] = tab
        return CheckResult(combine(states), "Wiener-type shell series", {"cases": out}, tables)

    def check_support(self) -> CheckResult:
        cfg = self.cfg
        q = float(cfg.option("support", "charge", cfg.charges[0]))
        expect = cfg.option("support", "expect")
        keys = self.ladder_keys()[-2:] if self.unbounded else self.ladder_keys()[-1:]
        center = truncation_center(cfg.shape)
        reps = [support_report(self.gauss(k, q), center=center) for k in keys]
        tab = Table(["resolution", "truncation_radius", "support_radius", "point_fraction",
                     "boundary_mass_fraction", "classification"])
        for k, r in zip(keys, reps):
            tab.add(k[0], k[1], r.support_radius, r.point_fraction, r.boundary_mass_fraction, r.classification)
        top = reps[-1]
        ok = expect is None or top.classification == expect
        vals = {"q": q, "expect": expect, **top.summary()}
        if top.classification == "compactly_contained" and len(reps) > 1:
            drift = abs(top.support_radius - reps[0].support_radius) / max(top.support_radius, 1e-300)
            vals["drift"] = drift
            ok &= drift < cfg.tol("support_drift")
        return CheckResult(_status(ok), "support classification of the minimiser", vals,
                           {"support_radius": tab})

    def check_symmetry(self) -> CheckResult:
        cfg = self.cfg
        s = cfg.option("symmetry", "sigma")
        sigma = DiracMeasure(tuple(s["location"]), float(s.get("charge", 1.0)))
        zeta = self.omega(cfg.charges[0])
        keys = self.refinement_keys()[:2]
        gaps = [balayage_symmetry_check(self.ctx(k), zeta, sigma, self.opts) for k in keys]
        dec = _decreasing(gaps, cfg.tol("refinement_floor"))
        ok = gaps[0] <= cfg.tol("symmetry") and dec
        tab = Table(["resolution", "residual"])
        for k, g in zip(keys, gaps):
            tab.add(k[0], g)
        return CheckResult(_status(ok), "mutual energy symmetry of balayage",
                           {"residuals": gaps, "decreases": dec}, {"symmetry": tab})

    def check_dual(self) -> CheckResult:
        cfg, rng = self.cfg, self.rng("dual")
        key = self.ladder_keys()[0]
        ctx, q = self.ctx(key), cfg.charges[0]
        bal = self.sweep(key, q)
        idx = support_points(bal.swept)
        samples = []
        for _ in range(int(cfg.option("dual", "samples", 20))):
            w = np.zeros(ctx.n_points)
            w[idx] = rng.random(idx.size)
            samples.append(w * (rng.uniform(0.2, 2.0) / w.sum()))
        rep = dual_field_check(ctx, self.omega(q), samples, rng=rng, bal=bal)
        tol = cfg.tol("dual_gap")
        ok = rep.max_gap <= tol and rep.at_swept_gap <= tol and rep.minimiser_ok
        return CheckResult(_status(ok), "field of omega vs field of its sweep",
                           {"resolution": key[0], "truncation_radius": key[1], **rep.summary()})

    def check_theorem_ap(self) -> CheckResult:
        cfg = self.cfg
        z = [float(c) for c in cfg.option("theorem_ap", "z")]
        keys = self.truncation_keys()
        ladder = [LadderStep(k[1], self.ctx(k), self.eq(k), self.harmonic(k, z)) for k in keys]
        out = theorem_ap_suite(cfg.params, cfg.shape, z, cfg.charges, keys[0][0],
                               [k[1] for k in keys], ladder=ladder,
                               distance_tol=cfg.tol("harmonic_distance"),
                               drift_tol=cfg.tol("support_drift"))
        tab = Table(["q", "status", "verdict", "existence", "c_const", "constant_sign"])
        cap = Table(["truncation_radius", "capacity", "harmonic_mass"])
        for s in ladder:
            cap.add(s.radius, s.equilibrium.capacity, s.harmonic.mass_after)
        for r in out:
            r["verdict"] = _ap_label(r["claims"])
            tab.add(r["q"], r["status"], r["verdict"], r["claims"]["existence"]["verdict"],
                    r["gauss"]["c_const"], r["claims"]["constant_sign"]["status"])
        return CheckResult(combine(r["status"] for r in out), "point-charge suite on the truncation ladder",
                           {"z": z, "charges": out}, {"theorem_ap": tab, "capacity_vs_radius": cap})

    def check_solvability(self) -> CheckResult:
        cfg = self.cfg
        keys = self.ladder_keys()
        th = SolvabilityThresholds(cfg.tol("stable_increment"), cfg.tol("divergent_increment"))
        expect = cfg.option("solvability", "expect") or [None] * len(cfg.charges)
        tab = Table(["q", "verdict", "branch", "last_increment", "swept_mass", "expected"])
        cap = Table(["resolution", "truncation_radius", "capacity"])
        for k in keys:
            cap.add(k[0], k[1], self.eq(k).capacity)
        out, states = [], []
        for q, want in zip(cfg.charges, expect):
            sv = classify_solvability([self.ctx(k) for k in keys], self.omega(q),
                                      [self.eq(k) for k in keys], [self.sweep(k, q) for k in keys], th)
            if sv.verdict == "inconclusive":
                st = INCONCLUSIVE
            else:
                st = _status(want is None or sv.verdict == want)
            states.append(st)
            out.append({"q": q, "expected": want, "status": st, **sv.summary()})
            tab.add(q, sv.verdict, sv.branch, sv.increments[-1], sv.swept_masses[-1], want)
        return CheckResult(combine(states), "existence of the minimiser from the ladder",
                           {"charges": out}, {"solvability": tab, "capacity_ladder_solvability": cap})


def _ap_label(claims: dict) -> str:
    """One-word summary: unsolvable, solvable-boundary, solvable-full or solvable-compact."""
    exist = claims["existence"]["verdict"]
    if exist != "solvable":
        return exist
    if "compact_support" in claims:
        return f"solvable-{'compact' if claims['compact_support']['status'] == PASS else 'noncompact'}"
    if "support" in claims:
        full = claims["support"]["expected"] == "full_support"
        return f"solvable-{'full' if full else 'boundary'}"
    return "solvable"


def oracle_crosscheck(rng, instances: int, min_n: int, max_n: int, opts: QpOptions) -> dict:
    """Active-set solver vs exhaustive support enumeration on random (P1) and (P2) instances."""
    worst_obj = worst_k = 0.0
    for i in range(instances):
        n = int(rng.integers(min_n, max_n + 1))
        if i % 2:
            M = rng.standard_normal((n, n))
            K = M @ M.T / n + 0.1 * np.eye(n)
        else:
            pts = rng.uniform(0, 1, (n, 3))
            params = RieszParams(3, float(rng.choice([1.0, 1.5, 2.0])))
            K = np.array(assemble(params, DiscretizedSet(pts, np.ones(n), np.zeros(n, bool), 3)).K)
        b = rng.standard_normal(n) + 0.5
        for mass in (None, 1.0):
            p = QpProblem(K, b, mass)
            a, o = solve(p, opts), oracle_solve(p)
            fa, fo = p.objective(a.w), p.objective(o.w)
            worst_obj = max(worst_obj, abs(fa - fo) / max(abs(fo), 1e-300))
            d = a.w - o.w
            worst_k = max(worst_k, math.sqrt(max(float(d @ K @ d), 0.0)))
    return {"instances": instances, "max_objective_gap": worst_obj, "max_knorm_gap": worst_k}


__all__ = ["CheckResult", "Runner", "Table", "combine", "oracle_crosscheck"]
