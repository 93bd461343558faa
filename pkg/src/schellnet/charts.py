"""Figure rendering for sweep tables and board snapshots.

Figures are built headless and written to SVG (or any format matplotlib
recognises from the file suffix).  Every meaningful artist carries an SVG gid
so the structure of the output can be inspected and tested.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .csvio import atomic_write_text, read_sweep_csv  # noqa: E402
from .metrics import freeman_index, welfare  # noqa: E402
from .population import Color, Configuration  # noqa: E402

# panel layout: (field, title), two rows of three
SWEEP_PANELS = (
    ("iterations", "Iterations"),
    ("moran", "Moran's I"),
    ("fsi", "Segregation (FSI)"),
    ("movers", "Agents moved"),
    ("avg_welfare", "Average welfare"),
    ("total_welfare", "Total welfare"),
)

_RED = "#c23b22"
_BLUE = "#3b6fb6"


def build_sweep_figure(rows, axis_label: str, stacked: bool = False, num_agents: int | None = None):
    """Six-panel summary of a sweep table.

    `rows` is a list of column dicts as returned by read_sweep_csv.  Each
    panel shows the mean as a line with a +/- 1 sd band.  With `stacked`, the
    welfare panels additionally show the cumulative colour and friend parts
    as shaded areas under the total.
    """
    rows = sorted(rows, key=lambda r: r["sweep_value"])
    xs = np.array([r["sweep_value"] for r in rows])
    fig, axes = plt.subplots(2, 3, figsize=(12.0, 7.0))
    fig.subplots_adjust(hspace=0.35, wspace=0.3)
    for ax, (f, title) in zip(axes.ravel(), SWEEP_PANELS):
        mean = np.array([r[f"{f}_mean"] for r in rows])
        sd = np.array([r[f"{f}_sd"] for r in rows])
        ax.set_gid(f"panel-{f}")
        band = ax.fill_between(xs, mean - sd, mean + sd, alpha=0.25, color="#888888", lw=0)
        band.set_gid(f"band-{f}")
        if stacked and f in ("avg_welfare", "total_welfare"):
            scale = (num_agents or 1) if f == "avg_welfare" else 1
            color_part = np.array([r["welfare_color_part_mean"] for r in rows]) / scale
            friend_part = np.array([r["welfare_friend_part_mean"] for r in rows]) / scale
            a1 = ax.fill_between(xs, 0.0, color_part, alpha=0.5, color=_RED, lw=0)
            a1.set_gid(f"stack-color-{f}")
            a2 = ax.fill_between(xs, color_part, color_part + friend_part,
                                 alpha=0.5, color="#7a9b52", lw=0)
            a2.set_gid(f"stack-friend-{f}")
        (line,) = ax.plot(xs, mean, color="black", lw=2.0)
        line.set_gid(f"mean-{f}")
        ax.set_title(title, fontsize=11)
        ax.set_xlabel(axis_label)
        ax.grid(True, alpha=0.3)
    return fig


def save_figure(fig, path) -> None:
    """Atomic savefig: render to memory, then write like any other file."""
    from io import BytesIO

    suffix = str(path).rsplit(".", 1)[-1].lower() if "." in str(path) else "svg"
    buf = BytesIO()
    fig.savefig(buf, format=suffix)
    data = buf.getvalue()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        # binary formats such as png skip the text path
        import os
        import tempfile
        from pathlib import Path

        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=p.name + ".", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, p)
        return
    atomic_write_text(path, text)


def render_sweep_chart(csv_path, out_path, stacked: bool = False,
                       axis_label: str = "sweep value", num_agents: int | None = None) -> None:
    """Read a sweep table and write the six-panel figure next to it."""
    rows = read_sweep_csv(csv_path)
    fig = build_sweep_figure(rows, axis_label, stacked=stacked, num_agents=num_agents)
    try:
        save_figure(fig, out_path)
    finally:
        plt.close(fig)


def build_snapshot_figure(config: Configuration, edges=None, annotation: str | None = None):
    """Draw the board: coloured cells with agent ids, optional friendship edges."""
    n = config.grid.n
    fig, ax = plt.subplots(figsize=(7.0, 7.0 if annotation is None else 7.4))
    ax.set_gid("board")
    ax.set_xlim(0.5, n + 0.5)
    ax.set_ylim(n + 0.5, 0.5)  # row 1 on top, like a printed table
    ax.set_xticks(range(1, n + 1))
    ax.set_yticks(range(1, n + 1))
    ax.set_aspect("equal")
    for g in range(n + 1):
        ax.axhline(g + 0.5, color="#cccccc", lw=0.6)
        ax.axvline(g + 0.5, color="#cccccc", lw=0.6)
    centers = {}
    for agent in config.agents():
        cell = config.cell_of(agent)
        centers[agent.id] = (cell.col, cell.row)
        face = _RED if agent.color == Color.RED else _BLUE
        patch = plt.Rectangle((cell.col - 0.5, cell.row - 0.5), 1.0, 1.0,
                              facecolor=face, alpha=0.85, edgecolor="none")
        patch.set_gid(f"agent-cell-{agent.id}")
        ax.add_patch(patch)
        ax.text(cell.col, cell.row, str(agent.id), ha="center", va="center",
                fontsize=7, color="white")
    if edges:
        for a, b in sorted((min(a, b), max(a, b)) for a, b in edges):
            (xa, ya), (xb, yb) = centers[a], centers[b]
            (seg,) = ax.plot([xa, xb], [ya, yb], color="#222222", lw=0.5, alpha=0.5)
            seg.set_gid(f"edge-{a}-{b}")
    if annotation:
        ax.set_xlabel(annotation)
    return fig


def render_grid_snapshot(config: Configuration, out_path, graph=None, params=None,
                         edges=None) -> None:
    """Snapshot figure with an optional welfare / segregation annotation line.

    Friendship edges come from `graph` or, for rendering detached edge lists,
    directly from `edges`.  The annotation needs utility parameters; without
    them only the board is drawn.
    """
    if edges is None and graph is not None and graph.num_edges:
        edges = graph.edges
    annotation = None
    if params is not None and graph is not None:
        w = welfare(config, graph, params)
        annotation = f"total welfare = {w.total:.3f}, FSI = {freeman_index(config):.3f}"
    fig = build_snapshot_figure(config, edges=edges, annotation=annotation)
    try:
        save_figure(fig, out_path)
    finally:
        plt.close(fig)
