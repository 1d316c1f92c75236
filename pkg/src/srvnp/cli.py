"""Command-line harness: run, sweep, fixtures, validate."""
from __future__ import annotations

import argparse
import sys

from .fixtures import (TABLE1_ROWS, fig2_candidate_selection, run_fig1,
                       run_fig2, table1_scores)
from .runner import CSV_HEADER, SWEEP_PARAMS, run_scenario, sweep
from .scenario import ScenarioError, parse_scenario
from .sim import SimLogicError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_run(args) -> int:
    cfg = parse_scenario(args.config)
    res = run_scenario(cfg, protocol=args.protocol, trace=args.trace is not None)
    _write_lines(args.out, [CSV_HEADER, res.csv_row])
    if args.trace is not None:
        _write_lines(args.trace, res.trace or [])
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = parse_scenario(args.config)
    values = [float(v) for v in args.values.split(",") if v != ""]
    seeds = [int(s) for s in args.seeds.split(",") if s != ""]
    protocols = (args.protocols.split(",") if args.protocols
                 else [cfg.protocol])
    rows, _ = sweep(cfg, args.param, values, seeds, protocols)
    _write_lines(args.out, rows)
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    out: list[str] = []
    if args.name == "table1":
        scores = table1_scores()
        out.append("node computed printed")
        for name, (_, _, _, _, printed) in TABLE1_ROWS.items():
            out.append(f"{name} {scores[name]:g} {printed:g}")
    elif args.name == "fig1":
        res = run_fig1()
        out.append("initial_path=" + "-".join(res.initial_path))
        out.append("repaired_path=" + "-".join(res.repaired_path))
        out.append(f"sent={res.stats.sent} received={res.stats.received}")
        if args.trace is not None:
            _write_lines(args.trace, res.trace)
    elif args.name == "fig2":
        res = run_fig2()
        choice, scores = fig2_candidate_selection()
        out.append("initial_path=" + "-".join(res.initial_path))
        out.append("repair_path=" + "-".join(res.repair_path))
        out.append("selected=" + (res.selected or "none"))
        out.append("scores=" + " ".join(f"{k}:{v:g}" for k, v in scores.items()))
        if args.trace is not None:
            _write_lines(args.trace, res.trace)
    _write_lines(args.out, out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = parse_scenario(args.config)
    n_flows = len(cfg.effective_flows())
    print(f"ok: {cfg.node_count} nodes, {cfg.area_x:g}x{cfg.area_y:g} m, "
          f"{n_flows} flows, protocol={cfg.protocol}, seed={cfg.seed}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="srvnp",
        description="Deterministic WSN routing simulator (SRVNP vs AODV-like baseline)")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario, emit a CSV row")
    run_p.add_argument("config")
    run_p.add_argument("--trace", metavar="PATH", default=None)
    run_p.add_argument("--out", metavar="PATH", default=None)
    run_p.add_argument("--protocol", choices=["srvnp", "aodv_baseline"],
                       default=None)
    run_p.set_defaults(fn=_cmd_run)

    sw = sub.add_parser("sweep", help="run a parameter sweep, emit a CSV table")
    sw.add_argument("config")
    sw.add_argument("--param", required=True, choices=list(SWEEP_PARAMS))
    sw.add_argument("--values", required=True,
                    help="comma-separated parameter values")
    sw.add_argument("--seeds", required=True, help="comma-separated seeds")
    sw.add_argument("--protocols", default="srvnp,aodv_baseline")
    sw.add_argument("--out", metavar="PATH", default=None)
    sw.set_defaults(fn=_cmd_sweep)

    fx = sub.add_parser("fixtures", help="run a built-in fixture")
    fx.add_argument("name", choices=["fig1", "fig2", "table1"])
    fx.add_argument("--trace", metavar="PATH", default=None)
    fx.add_argument("--out", metavar="PATH", default=None)
    fx.set_defaults(fn=_cmd_fixtures)

    va = sub.add_parser("validate", help="parse and check a scenario file")
    va.add_argument("config")
    va.set_defaults(fn=_cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SimLogicError, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
