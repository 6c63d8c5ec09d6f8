"""Command line entry point: ``kgchannels <subcommand> <config>``."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import ScenarioConfig
from .errors import KGChannelsError
from .report import build_report, dumps
from .scenario import dump_green, dump_states, public, run_classical, run_quantum, validate_config
from .suite import run_convergence, run_validation_suite

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kgchannels", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="JSON config file")
        p.add_argument("--out", help="report path (default: config output.report, else stdout)")
        p.add_argument("--timing", action="store_true", help="record wall-clock runtime in the report")
        return p

    p = add("run-classical", "classical Alice/Bob/Charlie run")
    p.add_argument("--dump-dir", help="write CSV Cauchy data of the four states here")
    add("run-quantum", "vacuum Alice/Bob/Charlie run")
    p = add("validate", "config checks and the randomized property suite")
    p.add_argument("--config-only", action="store_true", help="only check the config")
    p = add("convergence", "grid-refinement study")
    p.add_argument("--levels", type=int, required=True)
    p = sub.add_parser("dump-green", help="Cauchy data of G f for a configured test function")
    p.add_argument("config")
    p.add_argument("--function", required=True, dest="function_id")
    p.add_argument("--format", choices=("csv", "bin"), default="csv")
    p.add_argument("--out", help="output file (default: <dump_dir or .>/green_<id>.<format>)")
    return ap


def _emit(report: dict, args, cfg: ScenarioConfig) -> None:
    path = args.out or cfg.raw["output"].get("report")
    text = dumps(report)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
        print(f"report written to {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _summary(rows) -> None:
    for r in rows:
        op = "<=" if r["mode"] == "max" else ">="
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}: {r['value']:.3e} ({op} {r['tolerance']:.3g})", file=sys.stderr)


def _run(args) -> int:
    cfg = ScenarioConfig.load(args.config)

    if args.command == "dump-green":
        default_dir = Path(cfg.raw["output"].get("dump_dir") or ".")
        out = args.out or default_dir / f"green_{args.function_id}.{args.format}"
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        print(dump_green(cfg, args.function_id, out, args.format))
        return EXIT_OK

    problems = validate_config(cfg)
    if args.command == "validate" and args.config_only:
        for msg in problems:
            print(f"violation: {msg}", file=sys.stderr)
        _emit(build_report(cfg, violations=problems), args, cfg)
        return EXIT_INVALID if problems else EXIT_OK
    if problems:
        for msg in problems:
            print(f"violation: {msg}", file=sys.stderr)
        return EXIT_INVALID

    start = time.perf_counter()
    blocks: dict = {}
    if args.command == "run-classical":
        block = run_classical(cfg)
        dump_dir = getattr(args, "dump_dir", None) or cfg.raw["output"].get("dump_dir")
        if dump_dir:
            dump_states(block, dump_dir, cfg.params.mass)
        blocks["classical"] = public(block)
        rows = block["checks"]
    elif args.command == "run-quantum":
        block = run_quantum(cfg)
        blocks["quantum"] = block
        rows = block["checks"]
    elif args.command == "validate":
        classical, quantum = run_classical(cfg), run_quantum(cfg)
        rows = run_validation_suite(cfg, classical, quantum)
        blocks.update(classical=public(classical), quantum=quantum, suite=rows, violations=[])
    else:
        rows = run_convergence(cfg, args.levels)
        blocks["convergence"] = rows
    runtime = time.perf_counter() - start if args.timing else None
    report = build_report(cfg, runtime, **blocks)
    _summary(rows)
    _emit(report, args, cfg)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAILED


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except (KGChannelsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
