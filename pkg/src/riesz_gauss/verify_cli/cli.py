"""Command line: ``riesz-verify run | validate | list``."""

from __future__ import annotations

import argparse
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from ..errors import ConfigurationError
from ..kernel import DEFAULT_MAX_POINTS
from .config import CHECKS, ConfigError, load_config, parse_text, validate_file
from .report import EXIT_INVALID, EXIT_OK, build_report, exit_status, write_outputs
from .runner import Runner


def _bundled_dir():
    return resources.files("riesz_gauss.verify_cli") / "scenarios"


def list_scenarios() -> dict[str, str]:
    """Bundled scenario names mapped to their one-line descriptions."""
    out = {}
    for entry in sorted(_bundled_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".yaml"):
            data, _ = parse_text(entry.read_text(), entry.name)
            out[entry.name[:-5]] = " ".join(str(data.get("description", "")).split())
    return out


def resolve_config(name_or_path) -> Path:
    """A file path as given, else the bundled scenario of that name."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    bundled = _bundled_dir() / f"{name_or_path}.yaml"
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError([])


def run_scenario(config, out_dir, seed=None, max_points=DEFAULT_MAX_POINTS, threads=1,
                 only=None, dump_kernel=False) -> tuple[int, dict]:
    """Run a scenario and write its outputs; returns ``(exit status, report)``."""
    cfg = load_config(resolve_config(config), {"seed": seed})
    checks = list(cfg.checks)
    if only:
        missing = [c for c in only if c not in checks]
        if missing:
            raise ConfigurationError(f"--check {', '.join(missing)}: not requested by scenario {cfg.name}")
        checks = [c for c in checks if c in only]
    t0 = time.perf_counter()
    runner = Runner(cfg, max_points=max_points, threads=threads)
    results, tables = {}, {}
    with threadpool_limits(limits=1):
        for name in checks:
            res = runner.run(name)
            results[name] = res
            tables.update(res.tables)
    wall = time.perf_counter() - t0
    report = build_report(cfg, results, tables, max_points, wall)
    write_outputs(out_dir, report, tables)
    if dump_kernel and runner._ctx:
        key = sorted(runner._ctx, key=lambda k: (k[0], k[1] or 0))[0]
        np.savetxt(Path(out_dir) / "kernel_debug.csv", runner._ctx[key].K, delimiter=",")
    return exit_status(results), report


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riesz-verify", description="Run potential-theory verification scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write report.json plus CSV tables")
    run.add_argument("--config", required=True, help="scenario file or bundled scenario name")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS, help="cap on grid points per set")
    run.add_argument("--threads", type=int, default=1, help="worker threads for kernel assembly")
    run.add_argument("--check", action="append", choices=CHECKS, metavar="NAME",
                     help="run only this check (repeatable)")
    run.add_argument("--dump-kernel", action="store_true", help="debug: write the first kernel matrix")
    val = sub.add_parser("validate", help="check a scenario file without running solvers")
    val.add_argument("--config", required=True)
    sub.add_parser("list", help="list bundled scenarios")
    return ap


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.command == "list":
        for name, desc in list_scenarios().items():
            print(f"{name}\t{desc}")
        return EXIT_OK
    try:
        path = resolve_config(args.config)
    except ConfigError:
        print(f"error: no scenario file or bundled scenario named {args.config!r}", file=sys.stderr)
        return EXIT_INVALID
    if args.command == "validate":
        diags = validate_file(path)
        for d in diags:
            print(d)
        print(f"{len(diags)} diagnostic(s)")
        return EXIT_INVALID if diags else EXIT_OK
    if args.threads < 1 or args.max_points < 2:
        print("error: --threads must be >= 1 and --max-points >= 2", file=sys.stderr)
        return EXIT_INVALID
    try:
        status, report = run_scenario(path, args.out, args.seed, args.max_points, args.threads,
                                      args.check, args.dump_kernel)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    s = report["summary"]
    for name, block in report["checks"].items():
        print(f"{name}: {block['verdict']}")
        if block["verdict"] == "error":
            print(f"  {block['detail']}", file=sys.stderr)
            for k, v in block["values"].get("diagnostics", {}).items():
                print(f"  {k}: {v}", file=sys.stderr)
    print(f"pass={s['pass']} fail={s['fail']} inconclusive={s['inconclusive']} error={s['error']} "
          f"-> exit {status}")
    return status


if __name__ == "__main__":
    sys.exit(main())
