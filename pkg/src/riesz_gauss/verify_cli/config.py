"""Scenario configuration: YAML parsing with line-anchored validation.

A scenario file is a YAML mapping.  Every diagnostic names the offending key
path (``options.wiener.ratio``) and the line it sits on, so a broken scenario
can be fixed without running any solver.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import ConfigurationError, DomainError
from ..geometry import RotationBody, parse_shape
from ..kernel import RieszParams
from ..measures import read_measure_csv
from ..potential_ops.wiener import MODES

CHECKS = ("equilibrium", "balayage", "gauss", "trichotomy", "representation", "kelvin",
          "wiener", "support", "symmetry", "dual", "theorem_ap", "solvability")

SUPPORT_CLASSES = ("full_support", "boundary_concentrated", "compactly_contained", "unclassified")
WIENER_VERDICTS = ("convergent", "divergent", "inconclusive")
SOLVABILITY_VERDICTS = ("solvable", "unsolvable", "inconclusive")

TOLERANCES = {
    "kkt_rel": 1e-7,
    "triple_identity": 1e-6,
    "capacity_error": 0.02,
    "mass_monotonicity": 1e-10,
    "domination": 0.1,
    "idempotence": 1e-6,
    "linearity": 1e-6,
    "symmetry": 1e-3,
    "refinement_floor": 1e-10,
    "representation": 1e-3,
    "kelvin_potential": 1e-10,
    "kelvin_distance": 5e-2,
    "kelvin_mass": 0.02,
    "harmonic_mass": 0.02,
    "dual_gap": 1e-6,
    "sign_delta": 0.02,
    "tol_c_rel": 1e-4,
    "harmonic_distance": 1e-3,
    "support_drift": 0.02,
    "oracle_objective": 1e-8,
    "oracle_knorm": 1e-6,
    "stable_increment": 0.05,
    "divergent_increment": 0.20,
    "wiener_decay": 0.7,
    "wiener_floor": 0.1,
}

TOP_KEYS = ("name", "description", "riesz", "set", "omega", "resolutions", "charges", "checks",
            "tolerances", "seed", "options")

# allowed keys per check options block
OPTION_KEYS = {
    "equilibrium": {"analytic_capacity"},
    "balayage": {"harmonic_probes", "domination_probes", "linearity_pairs"},
    "gauss": {"oracle"},
    "trichotomy": set(),
    "representation": {"unit_mass", "scaled_mass"},
    "kelvin": {"center", "probes"},
    "wiener": {"mode", "ratio", "center", "via_inversion", "max_shells", "resolved_radius",
               "min_shells", "cases", "expect"},
    "support": {"charge", "expect"},
    "symmetry": {"sigma"},
    "dual": {"samples"},
    "theorem_ap": {"z"},
    "solvability": {"expect"},
}


@dataclass(frozen=True)
class Diagnostic:
    path: str
    line: int | None
    message: str
    source: str = "<config>"

    def __str__(self) -> str:
        where = f"{self.source}:{self.line}" if self.line else self.source
        return f"{where}: {self.path or '<root>'}: {self.message}"


class ConfigError(ConfigurationError):
    """Raised when a scenario file fails to parse or validate; carries all diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    description: str
    params: RieszParams
    shape: dict
    truncations: tuple
    resolutions: tuple
    omega: dict
    charges: tuple
    checks: tuple
    tolerances: dict
    seed: int
    options: dict
    source: str = "<config>"
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def bounded(self) -> bool:
        return parse_shape(self.shape).bounded

    def option(self, check: str, key: str, default=None):
        return self.options.get(check, {}).get(key, default)

    def tol(self, key: str) -> float:
        return float(self.tolerances[key])


# ------------------------------------------------------------------ loading


def _line_map(node, path: str, out: dict):
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = str(k.value)
            sub = f"{path}.{key}" if path else key
            out[sub] = k.start_mark.line + 1
            _line_map(v, sub, out)
            out[sub] = k.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_map(v, f"{path}[{i}]", out)


def parse_text(text: str, source: str = "<config>"):
    """YAML text to ``(data, lines)``; ``lines`` maps key paths to 1-based line numbers."""
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        if node is None:
            raise ConfigError([Diagnostic("", 1, "empty scenario file", source)])
        lines: dict = {}
        _line_map(node, "", lines)
        data = loader.construct_document(node)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else None
        raise ConfigError([Diagnostic("", line, f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                                      source)]) from None
    finally:
        loader.dispose()
    return data, lines


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Read and validate a scenario file; raises :class:`ConfigError` on any diagnostic."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([Diagnostic("", None, f"cannot read: {exc.strerror}", str(path))]) from None
    data, lines = parse_text(text, str(path))
    diags = validate_data(data, lines, str(path), base_dir=path.parent)
    if diags:
        raise ConfigError(diags)
    return _build(data, str(path), base_dir=path.parent, overrides=overrides or {})


def validate_file(path) -> list[Diagnostic]:
    try:
        path = Path(path)
        data, lines = parse_text(path.read_text(), str(path))
    except ConfigError as exc:
        return exc.diagnostics
    except OSError as exc:
        return [Diagnostic("", None, f"cannot read: {exc.strerror}", str(path))]
    return validate_data(data, lines, str(path), base_dir=path.parent)


# --------------------------------------------------------------- validation


class _Collector:
    def __init__(self, lines, source):
        self.lines, self.source, self.items = lines, source, []

    def add(self, path, message):
        line = self.lines.get(path)
        probe = path
        while line is None and probe:
            probe = probe.rpartition(".")[0] if "." in probe else probe.rpartition("[")[0]
            line = self.lines.get(probe)
        self.items.append(Diagnostic(path, line, message, self.source))


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _ladder(d: _Collector, path, v, kind, minimum, required=True):
    if v is None:
        if required:
            d.add(path, "is required")
        return
    if not isinstance(v, list) or not v:
        d.add(path, "must be a non-empty list")
        return
    check = _is_int if kind == "int" else _is_num
    for i, x in enumerate(v):
        if not check(x) or x < minimum:
            d.add(f"{path}[{i}]", f"must be {'an integer' if kind == 'int' else 'a number'} >= {minimum}")
            return
    if any(b <= a for a, b in zip(v, v[1:])):
        d.add(path, "must be strictly increasing")


def _point(d, path, v, dim):
    if not isinstance(v, list) or len(v) != dim or not all(_is_num(x) for x in v):
        d.add(path, f"must be a list of {dim} numbers")
        return False
    return True


def _dirac(d, path, v, dim, charge_required=False):
    if not isinstance(v, dict):
        d.add(path, "must be a mapping with location and charge")
        return
    _point(d, f"{path}.location", v.get("location"), dim)
    q = v.get("charge", None if charge_required else 1.0)
    if not _is_num(q) or q <= 0:
        d.add(f"{path}.charge", "must be a positive number")


def _shape(d, path, v):
    try:
        return parse_shape(v)
    except ConfigurationError as exc:
        d.add(path, str(exc))
    except Exception as exc:  # shape constructors raise plain errors on bad values
        d.add(path, f"invalid shape: {exc}")
    return None


def validate_data(data, lines, source="<config>", base_dir=".") -> list[Diagnostic]:
    """All diagnostics for a parsed scenario; never runs a solver."""
    d = _Collector(lines, source)
    if not isinstance(data, dict):
        d.add("", "scenario must be a mapping")
        return d.items
    for k in data:
        if k not in TOP_KEYS:
            d.add(str(k), f"unknown key (allowed: {', '.join(TOP_KEYS)})")

    if not isinstance(data.get("name"), str) or not data.get("name"):
        d.add("name", "must be a non-empty string")

    dim = 3
    riesz = data.get("riesz")
    if not isinstance(riesz, dict):
        d.add("riesz", "must be a mapping with dim and alpha")
    else:
        dim_v, alpha = riesz.get("dim"), riesz.get("alpha")
        if not _is_int(dim_v):
            d.add("riesz.dim", "must be an integer")
        elif not _is_num(alpha):
            d.add("riesz.alpha", "must be a number")
        else:
            try:
                RieszParams(dim_v, float(alpha))
                dim = dim_v
            except ConfigurationError as exc:
                d.add("riesz.alpha", str(exc))
        for k in riesz:
            if k not in ("dim", "alpha"):
                d.add(f"riesz.{k}", "unknown key")

    shape = None
    sset = data.get("set")
    if not isinstance(sset, dict) or "shape" not in sset:
        d.add("set", "must be a mapping with a shape")
    else:
        for k in sset:
            if k not in ("shape", "truncations"):
                d.add(f"set.{k}", "unknown key")
        shape = _shape(d, "set.shape", sset["shape"])
        if shape is not None and shape.dim != dim:
            d.add("set.shape", f"shape dimension {shape.dim} != riesz.dim {dim}")
        unbounded = shape is not None and not shape.bounded
        _ladder(d, "set.truncations", sset.get("truncations"), "num", 1e-12, required=unbounded)

    _ladder(d, "resolutions", data.get("resolutions"), "int", 2)

    omega = data.get("omega", {"type": "none"})
    if not isinstance(omega, dict) or omega.get("type") not in ("none", "dirac", "measure_file"):
        d.add("omega.type" if isinstance(omega, dict) else "omega",
              "must be one of none, dirac, measure_file")
    elif omega["type"] == "dirac":
        _dirac(d, "omega", omega, dim)
    elif omega["type"] == "measure_file":
        p = omega.get("path")
        if not isinstance(p, str):
            d.add("omega.path", "must be a file path")
        elif not (Path(base_dir) / p).is_file():
            d.add("omega.path", f"file not found: {p}")
        elif isinstance(dim, int):
            try:
                read_measure_csv(Path(base_dir) / p, dim)
            except (DomainError, ValueError) as exc:
                d.add("omega.path", str(exc))

    if "charges" in data:
        _ladder(d, "charges", data["charges"], "num", 1e-300)

    checks = data.get("checks")
    if not isinstance(checks, list) or not checks:
        d.add("checks", "must be a non-empty list")
        checks = []
    else:
        seen = set()
        for i, c in enumerate(checks):
            if c not in CHECKS:
                d.add(f"checks[{i}]", f"unknown check {c!r} (known: {', '.join(CHECKS)})")
            elif c in seen:
                d.add(f"checks[{i}]", f"duplicate check {c!r}")
            seen.add(c)

    tols = data.get("tolerances", {})
    if not isinstance(tols, dict):
        d.add("tolerances", "must be a mapping")
    else:
        for k, v in tols.items():
            if k not in TOLERANCES:
                d.add(f"tolerances.{k}", "unknown tolerance")
            elif not _is_num(v) or v <= 0:
                d.add(f"tolerances.{k}", "must be a positive number")

    seed = data.get("seed", 0)
    if not _is_int(seed) or seed < 0:
        d.add("seed", "must be a nonnegative integer")

    opts = data.get("options", {})
    if not isinstance(opts, dict):
        d.add("options", "must be a mapping")
        opts = {}
    for name, block in opts.items():
        path = f"options.{name}"
        if name not in CHECKS:
            d.add(path, f"unknown check {name!r}")
            continue
        if not isinstance(block, dict):
            d.add(path, "must be a mapping")
            continue
        for k in block:
            if k not in OPTION_KEYS[name]:
                d.add(f"{path}.{k}", f"unknown option (allowed: {', '.join(sorted(OPTION_KEYS[name])) or 'none'})")
    _validate_requirements(d, data, checks, opts, dim, shape)
    return d.items


def _validate_requirements(d, data, checks, opts, dim, shape):
    omega = data.get("omega", {"type": "none"})
    has_omega = isinstance(omega, dict) and omega.get("type") in ("dirac", "measure_file")
    unbounded = shape is not None and not shape.bounded
    truncs = (data.get("set") or {}).get("truncations") or []
    res = data.get("resolutions") or []
    for c in ("balayage", "gauss", "trichotomy", "representation", "support", "dual", "solvability",
              "symmetry"):
        if c in checks and not has_omega:
            d.add("omega", f"check {c!r} needs an omega source")
    if "trichotomy" in checks and len(truncs if unbounded else res) < 2:
        d.add("set.truncations" if unbounded else "resolutions", "trichotomy needs at least 2 ladder steps")
    if "solvability" in checks:
        if len(truncs if unbounded else res) < 3:
            d.add("set.truncations" if unbounded else "resolutions",
                  "solvability needs at least 3 ladder steps")
        exp = opts.get("solvability", {}).get("expect")
        if exp is not None:
            if not isinstance(exp, list) or not all(e in SOLVABILITY_VERDICTS for e in exp):
                d.add("options.solvability.expect", f"must be a list of {', '.join(SOLVABILITY_VERDICTS)}")
            elif len(exp) != len(data.get("charges") or [None]):
                d.add("options.solvability.expect", "needs one entry per charge")
    if "theorem_ap" in checks:
        if not unbounded or len(truncs) < 3:
            d.add("set.truncations", "theorem_ap needs an unbounded set with at least 3 truncations")
        z = opts.get("theorem_ap", {}).get("z")
        if z is None:
            d.add("options.theorem_ap.z", "is required")
        else:
            _point(d, "options.theorem_ap.z", z, dim)
        if not data.get("charges"):
            d.add("charges", "theorem_ap needs a list of charges")
    if "kelvin" in checks:
        if unbounded:
            d.add("set.shape", "kelvin needs a bounded set")
        c = opts.get("kelvin", {}).get("center")
        if c is None:
            d.add("options.kelvin.center", "is required")
        else:
            _point(d, "options.kelvin.center", c, dim)
        p = opts.get("kelvin", {}).get("probes", 20)
        if not _is_int(p) or p < 1:
            d.add("options.kelvin.probes", "must be a positive integer")
    if "symmetry" in checks:
        s = opts.get("symmetry", {}).get("sigma")
        if s is None:
            d.add("options.symmetry.sigma", "is required")
        else:
            _dirac(d, "options.symmetry.sigma", s, dim)
    if "support" in checks:
        e = opts.get("support", {}).get("expect")
        if e is not None and e not in SUPPORT_CLASSES:
            d.add("options.support.expect", f"must be one of {', '.join(SUPPORT_CLASSES)}")
    if "equilibrium" in checks:
        a = opts.get("equilibrium", {}).get("analytic_capacity")
        if a is not None and a != "auto" and not (_is_num(a) and a > 0):
            d.add("options.equilibrium.analytic_capacity", "must be 'auto' or a positive number")
    if "wiener" in checks:
        _validate_wiener(d, opts.get("wiener", {}), dim)
    if "gauss" in checks:
        o = opts.get("gauss", {}).get("oracle")
        if o is not None:
            if not isinstance(o, dict) or set(o) - {"instances", "min_n", "max_n"}:
                d.add("options.gauss.oracle", "must be a mapping of instances, min_n, max_n")
            else:
                lo, hi = o.get("min_n", 3), o.get("max_n", 10)
                if not _is_int(o.get("instances", 200)) or o.get("instances", 200) < 1:
                    d.add("options.gauss.oracle.instances", "must be a positive integer")
                if not (_is_int(lo) and _is_int(hi) and 1 <= lo <= hi <= 16):
                    d.add("options.gauss.oracle.max_n", "need 1 <= min_n <= max_n <= 16")


def _validate_wiener(d, w, dim):
    mode = w.get("mode")
    if mode not in MODES:
        d.add("options.wiener.mode", f"must be one of {', '.join(MODES)}")
    ratio = w.get("ratio")
    if not _is_num(ratio) or ratio <= 0:
        d.add("options.wiener.ratio", "must be a positive number")
    elif ratio == 1:
        d.add("options.wiener.ratio", "must differ from 1 (shells would not shrink or grow)")
    elif mode in MODES and MODES[mode][1] == "inward" and ratio > 1:
        d.add("options.wiener.ratio", f"mode {mode} shrinks towards the centre: ratio must be < 1")
    elif mode in MODES and MODES[mode][1] == "outward" and ratio < 1:
        d.add("options.wiener.ratio", f"mode {mode} grows towards infinity: ratio must be > 1")
    if "center" in w:
        _point(d, "options.wiener.center", w["center"], dim)
    if w.get("via_inversion") and not (mode == "ultrathin" and _is_num(ratio) and ratio < 1):
        d.add("options.wiener.via_inversion", "applies to the inward ultrathin series only")
    for k in ("max_shells", "min_shells"):
        if k in w and (not _is_int(w[k]) or w[k] < (1 if k == "max_shells" else 0)):
            d.add(f"options.wiener.{k}", "must be a nonnegative integer")
    rr = w.get("resolved_radius")
    if rr is not None and rr != "auto" and not (_is_num(rr) and rr > 0):
        d.add("options.wiener.resolved_radius", "must be 'auto' or a positive number")
    if w.get("expect") is not None and w["expect"] not in WIENER_VERDICTS:
        d.add("options.wiener.expect", f"must be one of {', '.join(WIENER_VERDICTS)}")
    cases = w.get("cases")
    if cases is not None:
        if not isinstance(cases, list) or not cases:
            d.add("options.wiener.cases", "must be a non-empty list")
            return
        for i, c in enumerate(cases):
            p = f"options.wiener.cases[{i}]"
            if not isinstance(c, dict) or "shape" not in c:
                d.add(p, "must be a mapping with label, shape and expect")
                continue
            if set(c) - {"label", "shape", "expect"}:
                d.add(p, "allowed keys are label, shape, expect")
            sh = _shape(d, f"{p}.shape", c["shape"])
            if sh is not None and sh.dim != dim:
                d.add(f"{p}.shape", f"shape dimension {sh.dim} != riesz.dim {dim}")
            if c.get("expect") is not None and c["expect"] not in WIENER_VERDICTS:
                d.add(f"{p}.expect", f"must be one of {', '.join(WIENER_VERDICTS)}")


# ----------------------------------------------------------------- building


def _build(data, source, base_dir, overrides) -> ScenarioConfig:
    tols = dict(TOLERANCES)
    tols.update(data.get("tolerances", {}))
    omega = dict(data.get("omega", {"type": "none"}))
    if omega["type"] == "measure_file":
        omega["path"] = os.fspath(Path(base_dir) / omega["path"])
    charges = data.get("charges")
    if charges is None:
        charges = [omega.get("charge", 1.0)] if omega["type"] == "dirac" else [1.0]
    seed = overrides.get("seed")
    seed = data.get("seed", 0) if seed is None else int(seed)
    riesz = data["riesz"]
    return ScenarioConfig(
        name=data["name"],
        description=str(data.get("description", "")).strip(),
        params=RieszParams(int(riesz["dim"]), float(riesz["alpha"])),
        shape=data["set"]["shape"],
        truncations=tuple(float(r) for r in data["set"].get("truncations") or ()),
        resolutions=tuple(int(r) for r in data["resolutions"]),
        omega=omega,
        charges=tuple(float(q) for q in charges),
        checks=tuple(data["checks"]),
        tolerances=tols,
        seed=seed,
        options={k: dict(v) for k, v in (data.get("options") or {}).items()},
        source=source,
        raw=data,
    )


def resolved_radius_auto(shape_spec):
    """Inner radius below which an inward shell series is not resolved by the grid."""
    shape = parse_shape(shape_spec)
    if isinstance(shape, RotationBody):
        return shape.cut
    return None
