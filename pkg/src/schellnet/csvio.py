"""Delimited-text input and output.

All writers go through an atomic temp-file-plus-rename, so a crash never
leaves a half-written file behind.  Floats are serialised with repr, which
round-trips every double exactly.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

from .geometry import TorusGrid
from .harness import SweepResult
from .metrics import OUTCOME_FIELDS, OutcomeRecord
from .population import Color, Configuration

SWEEP_HEADER = ["sweep_value"]
for _f in OUTCOME_FIELDS:
    SWEEP_HEADER += [f"{_f}_mean", f"{_f}_sd"]

SNAPSHOT_HEADER = ["agent_id", "color", "row", "col"]
EDGES_HEADER = ["agent_i", "agent_j"]
TRACE_HEADER = ["t", "mover_id", "origin", "dest", "utility_before", "utility_after"]


def atomic_write_text(path, text: str) -> None:
    """Write text to path via a temp file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return repr(float(x))


# ----- sweep results -----


def write_sweep_csv(result: SweepResult, path) -> None:
    """One row per sweep value: the value, then mean and sd of every outcome field."""
    rows = []
    for point in result.points:
        row = [_num(point.value)]
        for f in OUTCOME_FIELDS:
            row += [_num(point.means[f]), _num(point.sds[f])]
        rows.append(row)
    atomic_write_text(path, _render_csv(SWEEP_HEADER, rows))


def read_sweep_csv(path) -> list[dict]:
    """Rows as {column: float}; the header is checked verbatim."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != SWEEP_HEADER:
            raise ValueError(f"{path}: not a sweep table (unexpected header {header!r})")
        return [{c: float(v) for c, v in zip(header, row)} for row in reader]


# ----- single runs -----


def write_outcome_csv(record: OutcomeRecord, path) -> None:
    header = list(OUTCOME_FIELDS) + ["stop_reason"]
    row = [_num(v) for v in record.numeric()] + [record.stop_reason.value]
    atomic_write_text(path, _render_csv(header, [row]))


def write_trace_csv(trace, path) -> None:
    rows = [
        [s.t, s.mover_id, s.origin, s.dest, _num(s.utility_before), _num(s.utility_after)]
        for s in trace
    ]
    atomic_write_text(path, _render_csv(TRACE_HEADER, rows))


# ----- configuration snapshots -----


def write_snapshot_csv(config: Configuration, path) -> None:
    """Agent table: id, colour name, 1-based row and column."""
    rows = []
    for agent in config.agents():
        cell = config.cell_of(agent)
        rows.append([agent.id, str(agent.color), cell.row, cell.col])
    atomic_write_text(path, _render_csv(SNAPSHOT_HEADER, rows))


def read_snapshot_csv(path, n: int | None = None) -> Configuration:
    """Rebuild a Configuration from an agent table.

    The grid side defaults to the smallest board the coordinates fit on,
    which suits rendering; pass n explicitly when it matters.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != SNAPSHOT_HEADER:
            raise ValueError(f"{path}: not an agent snapshot (unexpected header {header!r})")
        entries = [(int(a), c, int(r), int(col)) for a, c, r, col in reader]
    entries.sort()
    if not entries:
        raise ValueError(f"{path}: snapshot contains no agents")
    if [e[0] for e in entries] != list(range(1, len(entries) + 1)):
        raise ValueError(f"{path}: agent ids must be exactly 1..{len(entries)}")
    if n is None:
        n = max(3, max(max(r, c) for _, _, r, c in entries))
    grid = TorusGrid(n)
    colors = []
    positions = []
    for _, cname, r, c in entries:
        if cname not in (str(Color.RED), str(Color.BLUE)):
            raise ValueError(f"{path}: unknown colour {cname!r}")
        colors.append(Color.RED if cname == str(Color.RED) else Color.BLUE)
        positions.append(grid.cell(r, c).id - 1)
    return Configuration(grid, np.array(colors, dtype=np.int8), np.array(positions))


def write_edges_csv(edges, path) -> None:
    """Friendship edge list, one undirected pair per row, lower id first."""
    rows = sorted((min(a, b), max(a, b)) for a, b in edges)
    atomic_write_text(path, _render_csv(EDGES_HEADER, rows))


def read_edges_csv(path) -> list[tuple[int, int]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != EDGES_HEADER:
            raise ValueError(f"{path}: not an edge list (unexpected header {header!r})")
        return [(int(a), int(b)) for a, b in reader]
