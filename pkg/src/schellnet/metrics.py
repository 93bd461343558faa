"""Segregation indices and welfare accounting on a configuration.

All three indices live on the contiguity graph whose vertices are the agents
and whose edges join agents on Moore-adjacent cells.  Colour enters as the
binary variable z (1 red, 0 blue).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import StopReason
from .geometry import adjacency_matrix
from .population import Configuration, FriendshipGraph
from .utility import UtilityParams, total_utility


@dataclass(frozen=True)
class ContiguityGraph:
    """Symmetric 0/1 weights over agent pairs; w[i, j] = 1 iff cells adjoin."""

    weights: np.ndarray

    @property
    def num_agents(self) -> int:
        return self.weights.shape[0]

    @property
    def num_edges(self) -> int:
        """Undirected edge count (each adjacent pair counted once)."""
        return int(self.weights.sum()) // 2

    def weight(self, agent_i: int, agent_j: int) -> int:
        return int(self.weights[agent_i - 1, agent_j - 1])


def contiguity_graph(config: Configuration) -> ContiguityGraph:
    adj = adjacency_matrix(config.grid.n)
    w = adj[config._pos][:, config._pos].astype(np.int8)
    w.flags.writeable = False
    return ContiguityGraph(w)


def _z(config: Configuration) -> np.ndarray:
    # 1 for red, 0 for blue
    return (config._colors == 0).astype(np.float64)


@dataclass(frozen=True)
class FreemanResult:
    value: float
    degenerate: bool
    num_edges: int
    num_cross_edges: int
    expected_cross_edges: float


def freeman_detail(config: Configuration) -> FreemanResult:
    """Freeman segregation index with its ingredients.

    Compares the observed number of cross-colour contiguity edges with the
    count expected if colours were assigned at random, clamping at 0 from
    below.  A configuration with no contiguity edges at all is degenerate and
    reported as 0 with the flag set.
    """
    reds, blues = config.counts
    if reds < 1 or blues < 1:
        raise ValueError("the segregation index needs both colours present")
    graph = contiguity_graph(config)
    w = graph.weights
    z = _z(config)
    cross = int((w * (z[:, None] != z[None, :])).sum()) // 2
    edges = graph.num_edges
    if edges == 0:
        return FreemanResult(0.0, True, 0, 0, 0.0)
    total = reds + blues
    p_cross = 2.0 * reds * blues / (total * (total - 1))
    expected = edges * p_cross
    value = max(0.0, (expected - cross) / expected)
    return FreemanResult(value, False, edges, cross, expected)


def freeman_index(config: Configuration) -> float:
    return freeman_detail(config).value


def morans_i(config: Configuration) -> float:
    """Join-count autocorrelation of colour over the contiguity graph.

    +1 when every edge joins like colours, negative when unlike colours
    dominate the adjacencies.
    """
    reds, blues = config.counts
    if reds < 1 or blues < 1:
        raise ValueError("Moran's I needs both colours present")
    w = contiguity_graph(config).weights.astype(np.float64)
    w_sum = w.sum()
    if w_sum == 0:
        raise ValueError("Moran's I needs at least one contiguity edge")
    z = _z(config)
    zc = z - z.mean()
    num = zc @ w @ zc
    den = float(zc @ zc)
    return float(config.num_agents / w_sum * num / den)


def gearys_c(config: Configuration) -> float:
    """Squared-difference counterpart of Moran's I on the same graph.

    0 when all edges join like colours; values above 1 signal unlike-colour
    contact in excess of the overall colour variance.
    """
    reds, blues = config.counts
    if reds < 1 or blues < 1:
        raise ValueError("Geary's C needs both colours present")
    w = contiguity_graph(config).weights.astype(np.float64)
    w_sum = w.sum()
    if w_sum == 0:
        raise ValueError("Geary's C needs at least one contiguity edge")
    z = _z(config)
    diff2 = (z[:, None] - z[None, :]) ** 2
    num = (config.num_agents - 1) * float((w * diff2).sum())
    den = 2.0 * w_sum * float(((z - z.mean()) ** 2).sum())
    return float(num / den)


@dataclass(frozen=True)
class WelfareSummary:
    """Population utility with everybody evaluated at their current cell.

    Staying put scores the full moving component, so welfare reflects the
    situation, not the history.  The parts are the weighted component sums;
    they add up to `total`.
    """

    avg: float
    total: float
    color_part: float
    friend_part: float
    moving_part: float


def welfare(
    config: Configuration, graph: FriendshipGraph, params: UtilityParams
) -> WelfareSummary:
    if config.num_agents == 0:
        raise ValueError("welfare of an empty population is undefined")
    color_part = friend_part = moving_part = total = 0.0
    for agent in config.agents():
        b = total_utility(agent, config.cell_of(agent), config, graph, params)
        color_part += b.weighted_color
        friend_part += b.weighted_friend
        moving_part += b.weighted_moving
        total += b.total
    return WelfareSummary(total / config.num_agents, total, color_part, friend_part, moving_part)


# Field order used by the experiment harness and the delimited output.
OUTCOME_FIELDS = (
    "iterations",
    "movers",
    "fsi",
    "moran",
    "geary",
    "avg_welfare",
    "total_welfare",
    "welfare_color_part",
    "welfare_friend_part",
)


@dataclass(frozen=True)
class OutcomeRecord:
    """Summary of one finished run."""

    iterations: int
    movers: int
    fsi: float
    moran: float
    geary: float
    avg_welfare: float
    total_welfare: float
    welfare_color_part: float
    welfare_friend_part: float
    stop_reason: StopReason

    def numeric(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, f)) for f in OUTCOME_FIELDS)


def collect_outcome(
    state, reason: StopReason, graph: FriendshipGraph, params: UtilityParams
) -> OutcomeRecord:
    """Measure a final state into an OutcomeRecord."""
    w = welfare(state.config, graph, params)
    return OutcomeRecord(
        iterations=state.t,
        movers=len(state.moved_agents),
        fsi=freeman_index(state.config),
        moran=morans_i(state.config),
        geary=gearys_c(state.config),
        avg_welfare=w.avg,
        total_welfare=w.total,
        welfare_color_part=w.color_part,
        welfare_friend_part=w.friend_part,
        stop_reason=reason,
    )
