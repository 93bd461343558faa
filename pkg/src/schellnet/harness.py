"""Experiment harness: parameter sweeps over batches of seeded replicate runs.

Every replicate h of an experiment draws three independent seed streams from
(base_seed, h): one for agent placement, one for the friendship network, one
for tie-breaking during the run.  The placement and network streams do not
depend on the sweep value, so matched replicates across sweep values start
from identical boards and the sweep isolates the parameter of interest.
"""

from __future__ import annotations

import dataclasses
import logging
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .dynamics import run
from .geometry import TorusGrid
from .metrics import OUTCOME_FIELDS, OutcomeRecord, collect_outcome
from .population import friendship_graph, init_configuration
from .utility import UtilityParams

log = logging.getLogger(__name__)

DEFAULT_BASE_SEED = 42

# stream tags for seed derivation
_STREAM_PLACEMENT = 0
_STREAM_NETWORK = 1
_STREAM_RUN = 2

SWEEP_AXES = ("x", "beta", "k")


def derive_seed(base_seed: int, h: int, stream: int, extra: int | None = None) -> int:
    """Stable 64-bit seed for one stream of replicate h.

    The extra word is shifted by one because SeedSequence absorbs a trailing
    zero, which would alias extra=0 with no extra at all.
    """
    entropy = (base_seed, h, stream) if extra is None else (base_seed, h, stream, extra + 1)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce a sweep bit for bit."""

    n: int = 10
    reds: int = 37
    blues: int = 37
    k: int = 0
    params: UtilityParams = UtilityParams(x=0.5)
    sweep_axis: str | None = None
    sweep_values: tuple = ()
    h_runs: int = 100
    base_seed: int = DEFAULT_BASE_SEED
    max_iter: int | None = None
    repermute_per_value: bool = False

    def __post_init__(self):
        if self.reds < 0 or self.blues < 0:
            raise ValueError("agent counts must be non-negative")
        if self.h_runs < 1:
            raise ValueError("h_runs must be at least 1")
        if self.base_seed < 0:
            raise ValueError("base_seed must be non-negative")
        if self.sweep_axis is None:
            if self.sweep_values:
                raise ValueError("sweep_values given without a sweep_axis")
            return
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if not self.sweep_values:
            raise ValueError("a sweep needs at least one value")
        total = self.reds + self.blues
        for v in self.sweep_values:
            if self.sweep_axis == "k":
                if int(v) != v or not (0 <= int(v) <= max(total - 1, 0)):
                    raise ValueError(f"swept degree {v!r} outside 0..{total - 1}")
            elif not (0.0 <= v <= 1.0):
                raise ValueError(f"swept {self.sweep_axis} value {v!r} outside [0, 1]")

    def at_value(self, value) -> tuple[UtilityParams, int]:
        """Parameters and network degree with the sweep value substituted in."""
        if self.sweep_axis == "x":
            return dataclasses.replace(self.params, x=float(value)), self.k
        if self.sweep_axis == "beta":
            return dataclasses.replace(self.params, beta=float(value)), self.k
        if self.sweep_axis == "k":
            return self.params, int(value)
        return self.params, self.k


def replicate_state(
    spec: ExperimentSpec,
    h: int,
    value=None,
    value_index: int | None = None,
    collect_trace: bool = False,
):
    """Execute replicate h at one sweep value; returns (state, reason, graph, params)."""
    params, k = spec.at_value(value) if value is not None else (spec.params, spec.k)
    grid = TorusGrid(spec.n)
    config = init_configuration(
        derive_seed(spec.base_seed, h, _STREAM_PLACEMENT), grid, (spec.reds, spec.blues)
    )
    net_extra = value_index if spec.repermute_per_value else None
    graph = friendship_graph(
        derive_seed(spec.base_seed, h, _STREAM_NETWORK, net_extra), k, spec.reds + spec.blues
    )
    state, reason = run(
        config, graph, params, max_iter=spec.max_iter,
        seed=derive_seed(spec.base_seed, h, _STREAM_RUN),
        collect_trace=collect_trace,
    )
    return state, reason, graph, params


def run_replicate(
    spec: ExperimentSpec, h: int, value=None, value_index: int | None = None
) -> OutcomeRecord:
    """Execute replicate h at one sweep value and measure the outcome."""
    state, reason, graph, params = replicate_state(spec, h, value, value_index)
    return collect_outcome(state, reason, graph, params)


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated outcomes of all replicates at one sweep value."""

    value: float
    means: dict = field(repr=False)
    sds: dict = field(repr=False)
    records: tuple = field(repr=False)


@dataclass(frozen=True)
class SweepResult:
    spec: ExperimentSpec
    points: tuple


def aggregate(records) -> tuple[dict, dict]:
    """Per-field mean and sample standard deviation (H - 1 denominator).

    A single record has no spread to estimate, so its sd is reported as 0.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot aggregate zero records")
    data = np.array([r.numeric() for r in records], dtype=np.float64)
    means = {f: float(data[:, i].mean()) for i, f in enumerate(OUTCOME_FIELDS)}
    if len(records) > 1:
        sds = {f: float(data[:, i].std(ddof=1)) for i, f in enumerate(OUTCOME_FIELDS)}
    else:
        sds = {f: 0.0 for f in OUTCOME_FIELDS}
    return means, sds


def _job(args) -> OutcomeRecord:
    spec, value_index, h = args
    return run_replicate(spec, h, spec.sweep_values[value_index], value_index)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> SweepResult:
    """Run the full sweep: every value, every replicate, then aggregate.

    Replicates are independent, so they may be farmed out to worker
    processes; results are reduced in (value, h) order either way and the
    output is identical for any worker count.
    """
    if spec.sweep_axis is None:
        raise ValueError("run_experiment needs a spec with a sweep axis")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    jobs = [
        (spec, vi, h)
        for vi in range(len(spec.sweep_values))
        for h in range(1, spec.h_runs + 1)
    ]
    if workers == 1:
        records = [_job(j) for j in jobs]
    else:
        with multiprocessing.Pool(workers) as pool:
            records = pool.map(_job, jobs, chunksize=max(1, len(jobs) // (workers * 8)))
    points = []
    for vi, value in enumerate(spec.sweep_values):
        recs = tuple(records[vi * spec.h_runs : (vi + 1) * spec.h_runs])
        means, sds = aggregate(recs)
        points.append(SweepPoint(float(value), means, sds, recs))
        log.debug("value %s done: %s", value, {f: round(means[f], 4) for f in ("fsi", "movers")})
    return SweepResult(spec, tuple(points))


# ===== replicate presets =====

X_GRID = tuple(i / 20 for i in range(21))
BETA_GRID = X_GRID
K_GRID = tuple(range(74))


def _spec(axis, values, **kw) -> ExperimentSpec:
    params = UtilityParams(**kw.pop("params"))
    return ExperimentSpec(params=params, sweep_axis=axis, sweep_values=tuple(values), **kw)


def _presets() -> dict:
    return {
        # movement and segregation against the colour threshold, no network
        "baseline": lambda: _spec("x", X_GRID, params=dict(alpha=1.0, beta=1.0)),
        # trade-off against moving costs at full intolerance, flat cost
        "cost-fixed-fair": lambda: _spec(
            "beta", BETA_GRID, params=dict(x=1.0, alpha=1.0, gamma=1, c_bar=0.5)
        ),
        "cost-fixed-low": lambda: _spec(
            "beta", BETA_GRID, params=dict(x=1.0, alpha=1.0, gamma=1, c_bar=0.01)
        ),
        "cost-fixed-high": lambda: _spec(
            "beta", BETA_GRID, params=dict(x=1.0, alpha=1.0, gamma=1, c_bar=0.99)
        ),
        # same, distance-scaled cost
        "cost-var-fair": lambda: _spec(
            "beta", BETA_GRID, params=dict(x=1.0, alpha=1.0, gamma=0, c_bar=0.5)
        ),
        "cost-var-low": lambda: _spec(
            "beta", BETA_GRID, params=dict(x=1.0, alpha=1.0, gamma=0, c_bar=0.01)
        ),
        "cost-var-high": lambda: _spec(
            "beta", BETA_GRID, params=dict(x=1.0, alpha=1.0, gamma=0, c_bar=0.99)
        ),
        # colour threshold sweep with a 3-regular friendship network, free moves
        "net-nocost": lambda: _spec(
            "x", X_GRID, k=3, params=dict(alpha=0.5, beta=1.0)
        ),
        # network and costs together
        "net-cost-fixed": lambda: _spec(
            "x", X_GRID, k=3, params=dict(alpha=0.5, beta=0.5, gamma=1, c_bar=0.5)
        ),
        "net-cost-var": lambda: _spec(
            "x", X_GRID, k=3, params=dict(alpha=0.5, beta=0.5, gamma=0, c_bar=0.5)
        ),
        # cost runs without any network, for comparison with the two above
        "nonet-cost-fixed": lambda: _spec(
            "x", X_GRID, params=dict(alpha=1.0, beta=0.5, gamma=1, c_bar=0.5)
        ),
        "nonet-cost-var": lambda: _spec(
            "x", X_GRID, params=dict(alpha=1.0, beta=0.5, gamma=0, c_bar=0.5)
        ),
        # friendship degree from isolated to complete
        "degree-sweep": lambda: _spec(
            "k", K_GRID, params=dict(x=1.0, alpha=0.5, beta=1.0)
        ),
    }


def list_presets() -> tuple[str, ...]:
    return tuple(sorted(_presets()))


def preset(name: str) -> ExperimentSpec:
    """A ready-to-run ExperimentSpec for one of the documented presets."""
    table = _presets()
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; choose from: {', '.join(sorted(table))}")
    return table[name]()
