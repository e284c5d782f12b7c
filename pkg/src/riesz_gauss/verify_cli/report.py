"""Report assembly: ``report.json`` plus one CSV file per table."""

from __future__ import annotations

import csv
import json
import math
import platform
from importlib import metadata
from pathlib import Path

import numpy as np

from ..kernel import DIAG_RULE
from .runner import ERROR, FAIL, INCONCLUSIVE, PASS, CheckResult, Table

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3


def jsonable(v):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _version(dist: str) -> str:
    try:
        return metadata.version(dist)
    except metadata.PackageNotFoundError:
        return "unknown"


def provenance(seed: int, max_points: int) -> dict:
    return {
        "package": _version("artifact"),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": _version("scipy"),
        "pyyaml": _version("PyYAML"),
        "rng": {"name": "scenario", "bit_generator": "PCG64",
                "seed": seed, "derivation": "seed sequence [seed, crc32(check name)]"},
        "max_points": max_points,
        "diagonal_rule": DIAG_RULE,
    }


def exit_status(results: dict) -> int:
    states = {r.verdict for r in results.values()}
    if ERROR in states:
        return EXIT_SOLVER
    if FAIL in states:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def build_report(cfg, results: dict[str, CheckResult], tables: dict, max_points: int,
                 wall_clock: float) -> dict:
    counts = {s: sum(r.verdict == s for r in results.values()) for s in (PASS, FAIL, INCONCLUSIVE, ERROR)}
    echo = dict(cfg.raw)
    echo["seed"] = cfg.seed
    return jsonable({
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.name,
        "config": echo,
        "checks": {name: r.to_json() for name, r in results.items()},
        "summary": {**counts, "exit_status": exit_status(results)},
        "tables": {name: f"{name}.csv" for name in tables},
        "provenance": provenance(cfg.seed, max_points),
        "wall_clock_seconds": wall_clock,
    })


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path: Path, table: Table):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.header)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])


def write_outputs(out_dir, report: dict, tables: dict):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for name, tab in tables.items():
        write_table(out / f"{name}.csv", tab)
