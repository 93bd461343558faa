"""Command line entry point.

Subcommands:

    run        one simulation from a config file, outcome (and optionally
               trace / board snapshot) written as delimited text
    sweep      full parameter sweep from a config file with a [sweep] section
    replicate  run one of the built-in experiment presets
    render     turn a sweep table or board snapshot back into an SVG figure

Exit status is 0 on success, 2 for command line usage errors, 1 for anything
else, with a one-line diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import csvio
from .charts import render_grid_snapshot, render_sweep_chart
from .harness import (
    list_presets,
    preset,
    replicate_state,
    run_experiment,
)
from .metrics import collect_outcome
from .runconfig import OUTPUT_DIR_ENV, ConfigError, load_config


def _out_dir(args) -> Path:
    import os

    if args.out_dir is not None:
        return Path(args.out_dir)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.to_spec()
    out = Path(args.out_dir) if args.out_dir else Path(cfg.out_dir)
    state, reason, graph, params = replicate_state(
        spec, args.replicate, collect_trace=args.trace
    )
    record = collect_outcome(state, reason, graph, params)
    prefix = args.prefix
    outcome_path = out / f"{prefix}_outcome.csv"
    csvio.write_outcome_csv(record, outcome_path)
    written = [outcome_path]
    if args.trace:
        path = out / f"{prefix}_trace.csv"
        csvio.write_trace_csv(state.trace, path)
        written.append(path)
    if args.snapshot:
        agents_path = out / f"{prefix}_agents.csv"
        edges_path = out / f"{prefix}_edges.csv"
        csvio.write_snapshot_csv(state.config, agents_path)
        csvio.write_edges_csv(graph.edges, edges_path)
        written += [agents_path, edges_path]
        if "svg" in cfg.formats or "png" in cfg.formats:
            fmt = "svg" if "svg" in cfg.formats else "png"
            board_path = out / f"{prefix}_board.{fmt}"
            render_grid_snapshot(state.config, board_path, graph=graph, params=params)
            written.append(board_path)
    print(f"{reason.value} after {record.iterations} moves by {record.movers} agents")
    for p in written:
        print(f"wrote {p}")
    return 0


def _write_sweep_outputs(result, out: Path, prefix: str, formats, axis_label: str,
                         stacked: bool, num_agents: int) -> list[Path]:
    written = []
    csv_path = out / f"{prefix}.csv"
    csvio.write_sweep_csv(result, csv_path)
    written.append(csv_path)
    for fmt in ("svg", "png"):
        if fmt in formats:
            fig_path = out / f"{prefix}.{fmt}"
            render_sweep_chart(csv_path, fig_path, stacked=stacked,
                               axis_label=axis_label, num_agents=num_agents)
            written.append(fig_path)
    return written


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.to_spec(require_sweep=True)
    out = Path(args.out_dir) if args.out_dir else Path(cfg.out_dir)
    result = run_experiment(spec, workers=args.workers)
    written = _write_sweep_outputs(
        result, out, args.prefix, cfg.formats, spec.sweep_axis,
        args.stacked, spec.reds + spec.blues,
    )
    for p in written:
        print(f"wrote {p}")
    return 0


def _cmd_replicate(args) -> int:
    import dataclasses

    spec = preset(args.preset)
    if args.seeds is not None:
        spec = dataclasses.replace(spec, h_runs=args.seeds)
    if args.base_seed is not None:
        spec = dataclasses.replace(spec, base_seed=args.base_seed)
    if args.values is not None:
        values = tuple(
            int(v) if spec.sweep_axis == "k" else float(v)
            for v in args.values.replace(",", " ").split()
        )
        spec = dataclasses.replace(spec, sweep_values=values)
    out = _out_dir(args)
    result = run_experiment(spec, workers=args.workers)
    formats = ("csv",) if args.no_figure else ("csv", "svg")
    written = _write_sweep_outputs(
        result, out, args.preset, formats, spec.sweep_axis,
        args.stacked, spec.reds + spec.blues,
    )
    for p in written:
        print(f"wrote {p}")
    return 0


def _cmd_render(args) -> int:
    src = Path(args.table)
    out = Path(args.out) if args.out else src.with_suffix(".svg")
    with open(src, newline="") as fh:
        first = fh.readline().strip()
    columns = first.split(",")
    if columns == csvio.SWEEP_HEADER:
        render_sweep_chart(src, out, stacked=args.stacked, axis_label=args.axis_label)
    elif columns == csvio.SNAPSHOT_HEADER:
        config = csvio.read_snapshot_csv(src, n=args.n)
        pairs = None
        if args.edges:
            pairs = csvio.read_edges_csv(args.edges)
            for a, b in pairs:
                if not (1 <= a <= config.num_agents and 1 <= b <= config.num_agents):
                    raise ValueError(f"edge ({a}, {b}) references an unknown agent")
        render_grid_snapshot(config, out, edges=pairs)
    else:
        raise ValueError(f"{src}: neither a sweep table nor an agent snapshot")
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schellnet",
        description="Chequerboard relocation dynamics with friendship networks and moving costs",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="chatty logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation from a config file")
    p_run.add_argument("-c", "--config", required=True)
    p_run.add_argument("--out-dir", default=None)
    p_run.add_argument("--prefix", default="run", help="output file name stem")
    p_run.add_argument("--replicate", type=int, default=1, help="replicate index h (seed stream)")
    p_run.add_argument("--trace", action="store_true", help="also write the move-by-move trace")
    p_run.add_argument("--snapshot", action="store_true",
                       help="also write the final board as tables and a figure")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep from a config file")
    p_sweep.add_argument("-c", "--config", required=True)
    p_sweep.add_argument("--out-dir", default=None)
    p_sweep.add_argument("--prefix", default="sweep")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--stacked", action="store_true",
                         help="shade welfare components under the totals")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_rep = sub.add_parser("replicate", help="run a built-in experiment preset")
    p_rep.add_argument("preset", choices=list_presets())
    p_rep.add_argument("--out-dir", default=None)
    p_rep.add_argument("--workers", type=int, default=1)
    p_rep.add_argument("--seeds", type=int, default=None, help="override the replicate count")
    p_rep.add_argument("--base-seed", type=int, default=None)
    p_rep.add_argument("--values", default=None, help="override the swept values")
    p_rep.add_argument("--stacked", action="store_true")
    p_rep.add_argument("--no-figure", action="store_true", help="write only the table")
    p_rep.set_defaults(func=_cmd_replicate)

    p_ren = sub.add_parser("render", help="render a sweep table or board snapshot to SVG")
    p_ren.add_argument("table", help="sweep table or agent snapshot (detected by header)")
    p_ren.add_argument("-o", "--out", default=None)
    p_ren.add_argument("--edges", default=None, help="edge list to overlay on a board")
    p_ren.add_argument("--n", type=int, default=None, help="board side for snapshots")
    p_ren.add_argument("--stacked", action="store_true")
    p_ren.add_argument("--axis-label", default="sweep value")
    p_ren.set_defaults(func=_cmd_render)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
