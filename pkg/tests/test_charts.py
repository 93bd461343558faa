"""Figure construction and SVG output, including coordinate parse-back."""

import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from schellnet.charts import (
    SWEEP_PANELS,
    build_snapshot_figure,
    build_sweep_figure,
    render_grid_snapshot,
    render_sweep_chart,
    save_figure,
)
from schellnet.csvio import write_sweep_csv
from schellnet.geometry import TorusGrid
from schellnet.harness import ExperimentSpec, run_experiment
from schellnet.metrics import OUTCOME_FIELDS
from schellnet.population import Configuration, friendship_graph, init_configuration
from schellnet.utility import UtilityParams

import matplotlib.pyplot as plt

G10 = TorusGrid(10)

SMALL = ExperimentSpec(
    n=6,
    reds=5,
    blues=5,
    params=UtilityParams(alpha=1.0, beta=1.0),
    sweep_axis="x",
    sweep_values=(0.0, 0.5, 1.0),
    h_runs=3,
    base_seed=13,
)


def _rows(values=(0.0, 0.25, 0.5, 1.0)):
    """Synthetic sweep table with distinct, deterministic numbers."""
    rows = []
    for i, x in enumerate(values):
        row = {"sweep_value": x}
        for j, f in enumerate(OUTCOME_FIELDS):
            row[f"{f}_mean"] = 1.0 + 2.0 * i + 0.25 * j
            row[f"{f}_sd"] = 0.5
        rows.append(row)
    return rows


def _artist(fig, gid):
    for ax in fig.axes:
        for group in (ax.lines, ax.collections):
            for artist in group:
                if artist.get_gid() == gid:
                    return artist
    raise AssertionError(f"no artist with gid {gid}")


def test_sweep_figure_panels():
    rows = _rows()
    fig = build_sweep_figure(rows, "threshold x")
    try:
        assert [ax.get_gid() for ax in fig.axes] == [f"panel-{f}" for f, _ in SWEEP_PANELS]
        for f, title in SWEEP_PANELS:
            line = _artist(fig, f"mean-{f}")
            xy = line.get_xydata()
            assert list(xy[:, 0]) == [r["sweep_value"] for r in rows]
            assert list(xy[:, 1]) == [r[f"{f}_mean"] for r in rows]
            _artist(fig, f"band-{f}")  # sd band always present
        titles = [ax.get_title() for ax in fig.axes]
        assert titles == [t for _, t in SWEEP_PANELS]
        assert all(ax.get_xlabel() == "threshold x" for ax in fig.axes)
    finally:
        plt.close(fig)


def test_sweep_figure_sorts_rows():
    rows = _rows()
    shuffled = [rows[2], rows[0], rows[3], rows[1]]
    fig = build_sweep_figure(shuffled, "x")
    try:
        xs = _artist(fig, "mean-fsi").get_xydata()[:, 0]
        assert list(xs) == sorted(xs)
    finally:
        plt.close(fig)


def test_constant_series_flat_band():
    rows = _rows()
    for row in rows:
        row["fsi_mean"] = 0.7
        row["fsi_sd"] = 0.0
    fig = build_sweep_figure(rows, "x")
    try:
        band = _artist(fig, "band-fsi")
        verts = band.get_paths()[0].vertices
        assert np.allclose(verts[:, 1], 0.7)
        line = _artist(fig, "mean-fsi")
        assert np.all(line.get_xydata()[:, 1] == 0.7)
    finally:
        plt.close(fig)


def test_stacked_welfare_geometry():
    rows = _rows()
    for i, row in enumerate(rows):
        color = 1.0 + i
        friend = 0.5
        row["welfare_color_part_mean"] = color
        row["welfare_friend_part_mean"] = friend
        row["total_welfare_mean"] = color + friend  # parts meet the total
        row["total_welfare_sd"] = 0.0
        row["avg_welfare_mean"] = (color + friend) / 2.0
        row["avg_welfare_sd"] = 0.0
    fig = build_sweep_figure(rows, "x", stacked=True, num_agents=2)
    try:
        xs = np.array([r["sweep_value"] for r in rows])
        for panel, scale in (("total_welfare", 1.0), ("avg_welfare", 2.0)):
            lower = _artist(fig, f"stack-color-{panel}")
            upper = _artist(fig, f"stack-friend-{panel}")
            total = _artist(fig, f"mean-{panel}").get_xydata()
            for x, want_total in zip(xs, total[:, 1]):
                lv = lower.get_paths()[0].vertices
                uv = upper.get_paths()[0].vertices
                top_color = lv[np.isclose(lv[:, 0], x), 1].max()
                top_friend = uv[np.isclose(uv[:, 0], x), 1].max()
                assert top_color == pytest.approx(
                    rows[list(xs).index(x)]["welfare_color_part_mean"] / scale
                )
                # stacked areas meet the mean line exactly
                assert top_friend == pytest.approx(want_total)
    finally:
        plt.close(fig)


def test_unstacked_has_no_areas():
    fig = build_sweep_figure(_rows(), "x", stacked=False)
    try:
        with pytest.raises(AssertionError):
            _artist(fig, "stack-color-total_welfare")
    finally:
        plt.close(fig)


def _svg_ids(path):
    ids = set()
    for _, elem in ET.iterparse(path):
        if elem.get("id"):
            ids.add(elem.get("id"))
    return ids


def _svg_line_points(svg_text, gid):
    m = re.search(rf'<g id="{gid}">.*?d="([^"]+)"', svg_text, re.S)
    assert m, f"gid {gid} not found in SVG"
    nums = re.findall(r"[-0-9.e]+", m.group(1))
    return np.array(nums, dtype=float).reshape(-1, 2)


def test_sweep_chart_svg_parse_back(tmp_path):
    result = run_experiment(SMALL)
    csv_path = tmp_path / "sweep.csv"
    svg_path = tmp_path / "sweep.svg"
    write_sweep_csv(result, csv_path)
    render_sweep_chart(csv_path, svg_path, axis_label="x")

    ids = _svg_ids(svg_path)
    for f, _ in SWEEP_PANELS:
        assert f"panel-{f}" in ids
        assert f"mean-{f}" in ids
        assert f"band-{f}" in ids

    # rebuild the identical figure to recover the data transform, then pull
    # the drawn points back out of the SVG and invert them into data space
    from schellnet.csvio import read_sweep_csv

    rows = read_sweep_csv(csv_path)
    fig = build_sweep_figure(rows, "x")
    try:
        fig.canvas.draw()  # settle autoscaled limits before using transforms
        svg_text = svg_path.read_text()
        height = fig.get_figheight() * 72.0
        for f in ("movers", "fsi"):
            pts = _svg_line_points(svg_text, f"mean-{f}")
            ax = next(a for a in fig.axes if a.get_gid() == f"panel-{f}")
            disp = np.column_stack([pts[:, 0], height - pts[:, 1]]) * fig.dpi / 72.0
            data = ax.transData.inverted().transform(disp)
            want_x = [r["sweep_value"] for r in rows]
            want_y = [r[f"{f}_mean"] for r in rows]
            assert np.allclose(data[:, 0], want_x, atol=1e-5)
            assert np.allclose(data[:, 1], want_y, atol=1e-5)
    finally:
        plt.close(fig)


def test_render_two_row_csv(tmp_path):
    # a hand-written two-point table renders with two points per series
    header = ["sweep_value"]
    for f in OUTCOME_FIELDS:
        header += [f"{f}_mean", f"{f}_sd"]
    lines = [",".join(header)]
    for value, level in ((0.0, 1.0), (1.0, 3.0)):
        lines.append(",".join([str(value)] + [str(level), "0.1"] * len(OUTCOME_FIELDS)))
    csv_path = tmp_path / "two.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    svg_path = tmp_path / "two.svg"
    render_sweep_chart(csv_path, svg_path)
    pts = _svg_line_points(svg_path.read_text(), "mean-iterations")
    assert pts.shape == (2, 2)
    ET.parse(svg_path)  # well-formed XML


def test_snapshot_figure_population():
    config = init_configuration(5, G10, (37, 37))
    fig = build_snapshot_figure(config)
    try:
        ax = fig.axes[0]
        cells = [p for p in ax.patches if (p.get_gid() or "").startswith("agent-cell-")]
        assert len(cells) == 74
        assert {p.get_gid() for p in cells} == {f"agent-cell-{i}" for i in range(1, 75)}
        assert len(ax.texts) == 74
        assert not [l for l in ax.lines if (l.get_gid() or "").startswith("edge-")]
    finally:
        plt.close(fig)


def test_snapshot_figure_empty_board():
    config = Configuration.from_cells(G10, [], [])
    fig = build_snapshot_figure(config)
    try:
        ax = fig.axes[0]
        assert not ax.patches
        assert not ax.texts
    finally:
        plt.close(fig)


def test_snapshot_figure_edges_and_annotation():
    config = init_configuration(5, G10, (37, 37))
    edges = [(1, 2), (3, 74)]
    fig = build_snapshot_figure(config, edges=edges, annotation="note line")
    try:
        ax = fig.axes[0]
        drawn = [l.get_gid() for l in ax.lines if (l.get_gid() or "").startswith("edge-")]
        assert sorted(drawn) == ["edge-1-2", "edge-3-74"]
        assert ax.get_xlabel() == "note line"
    finally:
        plt.close(fig)


def test_render_grid_snapshot_svg(tmp_path):
    config = init_configuration(5, G10, (37, 37))
    graph = friendship_graph(7, 2, 74)
    params = UtilityParams(x=0.5)
    out = tmp_path / "board.svg"
    render_grid_snapshot(config, out, graph=graph, params=params)
    ids = _svg_ids(out)
    assert "board" in ids
    assert sum(1 for i in ids if i.startswith("agent-cell-")) == 74
    assert sum(1 for i in ids if i.startswith("edge-")) == graph.num_edges


def test_save_figure_formats(tmp_path):
    fig = build_sweep_figure(_rows(), "x")
    try:
        svg = tmp_path / "fig.svg"
        png = tmp_path / "fig.png"
        save_figure(fig, svg)
        save_figure(fig, png)
        ET.parse(svg)
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert not list(tmp_path.glob("*.tmp"))
    finally:
        plt.close(fig)
