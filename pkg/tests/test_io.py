"""Delimited output files and INI run configuration parsing."""

import csv
import logging

import pytest

from schellnet.csvio import (
    EDGES_HEADER,
    SNAPSHOT_HEADER,
    SWEEP_HEADER,
    TRACE_HEADER,
    atomic_write_text,
    read_edges_csv,
    read_snapshot_csv,
    read_sweep_csv,
    write_edges_csv,
    write_outcome_csv,
    write_snapshot_csv,
    write_sweep_csv,
    write_trace_csv,
)
from schellnet.dynamics import run
from schellnet.geometry import TorusGrid
from schellnet.harness import ExperimentSpec, run_experiment
from schellnet.metrics import OUTCOME_FIELDS, collect_outcome
from schellnet.population import Configuration, friendship_graph, init_configuration
from schellnet.runconfig import OUTPUT_DIR_ENV, ConfigError, load_config
from schellnet.utility import ColorVariant, UtilityParams

SMALL = ExperimentSpec(
    n=6,
    reds=5,
    blues=5,
    params=UtilityParams(alpha=1.0, beta=1.0),
    sweep_axis="x",
    sweep_values=(0.0, 0.75),
    h_runs=3,
    base_seed=11,
)


def test_sweep_header_layout():
    assert SWEEP_HEADER[0] == "sweep_value"
    assert len(SWEEP_HEADER) == 1 + 2 * len(OUTCOME_FIELDS)
    assert SWEEP_HEADER[1:3] == ["iterations_mean", "iterations_sd"]


def test_sweep_roundtrip_exact(tmp_path):
    result = run_experiment(SMALL)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(result, path)
    rows = read_sweep_csv(path)
    assert len(rows) == 2
    for row, point in zip(rows, result.points):
        assert row["sweep_value"] == point.value
        for f in OUTCOME_FIELDS:
            # repr serialisation round-trips doubles bit for bit
            assert row[f"{f}_mean"] == point.means[f]
            assert row[f"{f}_sd"] == point.sds[f]


def test_sweep_csv_is_plain_lf_text(tmp_path):
    path = tmp_path / "sweep.csv"
    write_sweep_csv(run_experiment(SMALL), path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("ascii").splitlines()[0] == ",".join(SWEEP_HEADER)
    assert not list(tmp_path.glob("*.tmp"))


def test_read_sweep_rejects_other_tables(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_sweep_csv(path)


def test_write_outcome(tmp_path):
    graph = friendship_graph(0, 0, 10)
    params = UtilityParams(x=0.75)
    config = init_configuration(3, TorusGrid(6), (5, 5))
    state, reason = run(config, graph, params, seed=2)
    record = collect_outcome(state, reason, graph, params)
    path = tmp_path / "outcome.csv"
    write_outcome_csv(record, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(OUTCOME_FIELDS) + ["stop_reason"]
    assert len(rows) == 2
    assert rows[1][-1] == "converged"
    assert float(rows[1][0]) == record.iterations


def test_write_trace(tmp_path):
    graph = friendship_graph(0, 0, 10)
    params = UtilityParams(x=0.75)
    config = init_configuration(3, TorusGrid(6), (5, 5))
    state, _ = run(config, graph, params, seed=2, collect_trace=True)
    assert state.trace  # this seed does move
    path = tmp_path / "trace.csv"
    write_trace_csv(state.trace, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == TRACE_HEADER
    assert len(rows) == len(state.trace) + 1
    assert [int(r[0]) for r in rows[1:]] == list(range(1, len(state.trace) + 1))
    for raw, rec in zip(rows[1:], state.trace):
        assert float(raw[4]) == rec.utility_before
        assert float(raw[5]) == rec.utility_after


def test_snapshot_roundtrip(tmp_path):
    config = init_configuration(9, TorusGrid(10), (37, 37))
    path = tmp_path / "agents.csv"
    write_snapshot_csv(config, path)
    back = read_snapshot_csv(path, n=10)
    assert back == config
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    assert header == SNAPSHOT_HEADER


def test_snapshot_infers_grid(tmp_path):
    config = Configuration.from_cells(TorusGrid(10), [(1, 1)], [(7, 4)])
    path = tmp_path / "agents.csv"
    write_snapshot_csv(config, path)
    assert read_snapshot_csv(path).grid.n == 7
    assert read_snapshot_csv(path, n=10) == config


def test_snapshot_rejects_bad_ids(tmp_path):
    path = tmp_path / "agents.csv"
    path.write_text("agent_id,color,row,col\n1,red,1,1\n3,blue,2,2\n")
    with pytest.raises(ValueError):
        read_snapshot_csv(path)
    path.write_text("agent_id,color,row,col\n1,green,1,1\n")
    with pytest.raises(ValueError):
        read_snapshot_csv(path)
    path.write_text("id,color,row,col\n1,red,1,1\n")
    with pytest.raises(ValueError):
        read_snapshot_csv(path)
    path.write_text("agent_id,color,row,col\n")
    with pytest.raises(ValueError):
        read_snapshot_csv(path)


def test_edges_roundtrip(tmp_path):
    graph = friendship_graph(4, 3, 74)
    path = tmp_path / "edges.csv"
    write_edges_csv(graph.edges, path)
    back = read_edges_csv(path)
    assert len(back) == graph.num_edges
    assert back == sorted(back)
    assert all(a < b for a, b in back)
    assert frozenset(back) == graph.edges
    with open(path, newline="") as fh:
        assert next(csv.reader(fh)) == EDGES_HEADER


def test_atomic_write_creates_parents(tmp_path):
    target = tmp_path / "deep" / "nested" / "file.txt"
    atomic_write_text(target, "payload")
    assert target.read_text() == "payload"
    atomic_write_text(target, "replaced")
    assert target.read_text() == "replaced"
    assert not list((tmp_path / "deep" / "nested").glob("*.tmp"))


# ===== configuration files =====

FULL_CONFIG = """\
[grid]
n = 10

[population]
reds = 37
blues = 37

[network]
k = 3
repermute_per_value = false

[utility]
x = 0.5
alpha = 0.5
beta = 1.0
gamma = 1
c_bar = 0.5
color_variant = threshold-saturating

[process]
max_iter = auto
H = 100
base_seed = 42

[sweep]
axis = x
values = 0.0 0.25 0.5 0.75 1.0

[output]
directory = out
formats = csv svg
"""


def _write(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return path


def test_load_full_config(tmp_path):
    rc = load_config(_write(tmp_path, FULL_CONFIG))
    assert rc.n == 10
    assert (rc.reds, rc.blues) == (37, 37)
    assert rc.k == 3
    assert rc.params == UtilityParams(
        x=0.5, alpha=0.5, beta=1.0, gamma=1, c_bar=0.5,
        color_variant=ColorVariant.THRESHOLD_SATURATING,
    )
    assert rc.max_iter is None
    assert rc.h_runs == 100
    assert rc.base_seed == 42
    assert rc.sweep_axis == "x"
    assert rc.sweep_values == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert rc.out_dir == "out"
    assert rc.formats == ("csv", "svg")
    spec = rc.to_spec()
    assert spec.sweep_axis == "x" and spec.h_runs == 100


def test_defaults_with_notice(tmp_path, caplog):
    path = _write(tmp_path, "[sweep]\naxis = beta\nvalues = 0.0, 0.5, 1.0\n")
    with caplog.at_level(logging.INFO, logger="schellnet.runconfig"):
        rc = load_config(path)
    assert rc.n == 10 and rc.k == 0 and rc.h_runs == 100
    assert rc.params.x == 0.5 and rc.params.beta == 1.0
    assert rc.sweep_values == (0.0, 0.5, 1.0)
    notices = [r.message for r in caplog.records if "using default" in r.message]
    assert notices  # silent fallback would hide typos in hand-written files


def test_unknown_section_named(tmp_path):
    path = _write(tmp_path, "[grids]\nn = 10\n")
    with pytest.raises(ConfigError, match="grids"):
        load_config(path)


def test_unknown_key_named(tmp_path):
    path = _write(tmp_path, "[grid]\nside = 10\n")
    with pytest.raises(ConfigError, match="side"):
        load_config(path)


def test_h_key_is_case_sensitive(tmp_path):
    rc = load_config(_write(tmp_path, "[process]\nH = 7\n"))
    assert rc.h_runs == 7
    with pytest.raises(ConfigError, match="'h'"):
        load_config(_write(tmp_path, "[process]\nh = 7\n"))


def test_bad_value_reports_key(tmp_path):
    path = _write(tmp_path, "[grid]\nn = ten\n")
    with pytest.raises(ConfigError, match=r"\[grid\] n"):
        load_config(path)
    path = _write(tmp_path, "[utility]\ngamma = 2\n")
    with pytest.raises(ConfigError, match="utility"):
        load_config(path)
    path = _write(tmp_path, "[process]\nmax_iter = -3\n")
    with pytest.raises(ConfigError, match="max_iter"):
        load_config(path)


def test_values_range_shorthand(tmp_path):
    rc = load_config(_write(tmp_path, "[sweep]\naxis = k\nvalues = 0:5\n"))
    assert rc.sweep_values == (0, 1, 2, 3, 4, 5)
    assert all(isinstance(v, int) for v in rc.sweep_values)
    rc = load_config(_write(tmp_path, "[sweep]\naxis = x\nvalues = 0.1, 0.2 0.3\n"))
    assert rc.sweep_values == (0.1, 0.2, 0.3)
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "[sweep]\naxis = k\nvalues = 5:2\n"))


def test_sweep_needs_both_parts(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "[sweep]\naxis = x\n"))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "[sweep]\nvalues = 0.5\n"))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "[sweep]\naxis = cost\nvalues = 0.5\n"))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_output_dir_from_environment(tmp_path, monkeypatch):
    path = _write(tmp_path, "[grid]\nn = 6\n")
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    assert load_config(path).out_dir == "."
    monkeypatch.setenv(OUTPUT_DIR_ENV, "/tmp/results")
    assert load_config(path).out_dir == "/tmp/results"


def test_bad_format_rejected(tmp_path):
    path = _write(tmp_path, "[output]\nformats = csv, pdf\n")
    with pytest.raises(ConfigError, match="pdf"):
        load_config(path)


def test_to_spec_require_sweep(tmp_path):
    rc = load_config(_write(tmp_path, "[grid]\nn = 6\n"))
    assert rc.to_spec().sweep_axis is None
    with pytest.raises(ConfigError):
        rc.to_spec(require_sweep=True)


def test_nan_values_rejected(tmp_path):
    # float() accepts 'nan'; the spec range checks must not let it through
    path = _write(tmp_path, "[sweep]\naxis = x\nvalues = nan\n")
    with pytest.raises(ValueError):
        load_config(path).to_spec(require_sweep=True)
