"""Sequential relocation dynamics.

Each step evaluates every agent against every empty cell.  Agents whose best
empty cell strictly beats the utility of staying put form the improvable set;
among them the one with the lowest current utility moves (ties broken
uniformly), to its best strictly-better empty cell (again uniform on ties).
The run stops when nobody can improve, when a full configuration repeats, or
at an iteration cap.

Per step the RNG is consulted at most twice, mover first and destination
second, and only when the respective tie set has more than one member, so
traces are reproducible from the seed alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    CellRef,
    adjacency_matrix,
    cell_from_id,
    distance_norm,
    distance_step_matrix,
    neighbor_table,
)
from .population import Agent, Configuration, FriendshipGraph
from .utility import ColorVariant, UtilityParams


class StopReason(enum.Enum):
    CONVERGED = "converged"
    LOOP_DETECTED = "loop-detected"
    ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class StepRecord:
    """One executed relocation; cells are 1-based linear ids.

    utility_after is the score of the chosen destination and therefore
    includes the moving-cost component actually paid.
    """

    t: int
    mover_id: int
    origin: int
    dest: int
    utility_before: float
    utility_after: float


@dataclass
class SimState:
    """Mutable run state: configuration, clock, RNG, and visited fingerprints."""

    config: Configuration
    rng: np.random.Generator
    t: int = 0
    moved_agents: set = field(default_factory=set)
    seen: set = field(default_factory=set)
    trace: list | None = None

    @classmethod
    def start(
        cls, config: Configuration, seed=0, collect_trace: bool = False
    ) -> "SimState":
        """Fresh state over a private copy of `config`."""
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        state = cls(config=config.copy(), rng=rng, trace=[] if collect_trace else None)
        state.seen.add(state.config.fingerprint())
        return state


class _Engine:
    """Vectorised utility evaluation with incremental integer bookkeeping.

    Same-colour neighbour counts and friend step distances are maintained as
    exact integers, so incremental updates after a move agree bit for bit with
    a from-scratch rebuild and mathematical utility ties compare as equal
    floats wherever the inputs are dyadic.
    """

    def __init__(self, config: Configuration, graph: FriendshipGraph, params: UtilityParams):
        if graph.num_agents != config.num_agents:
            raise ValueError(
                f"graph covers {graph.num_agents} agents, configuration has {config.num_agents}"
            )
        n = config.grid.n
        self.config = config
        self.params = params
        self.k = graph.degree
        self.nbr = neighbor_table(n)
        self.adj = adjacency_matrix(n)
        self.dstep = distance_step_matrix(n)
        self.norm = distance_norm(n)
        self.colors = config._colors.astype(np.int64)
        counts = np.zeros((2, n * n), dtype=np.int64)
        for c in (0, 1):
            occ = np.zeros(n * n, dtype=np.int64)
            occ[config._pos[self.colors == c]] = 1
            counts[c] = occ[self.nbr].sum(axis=1)
        self.same_count = counts
        if self.k > 0:
            adjm = graph.adjacency
            self.friends = [np.flatnonzero(adjm[i]) for i in range(config.num_agents)]
            self.friend_steps = adjm.astype(np.int64) @ self.dstep[config._pos].astype(np.int64)
        else:
            self.friends = None
            self.friend_steps = None

    def _color_vec(self, xi: np.ndarray) -> np.ndarray:
        x = self.params.x
        variant = self.params.color_variant
        if variant is ColorVariant.THRESHOLD_SATURATING:
            return np.where(xi >= x, 1.0, xi)
        if variant is ColorVariant.LITERAL_STRICT:
            return xi * (xi > x)
        return xi * (xi >= x)

    def evaluate(self):
        """Current utilities, empty cells (ascending), and the agent x empty score matrix."""
        p = self.params
        pos = self.config._pos
        num = pos.size
        wc, wf, wm = p.weight_color, p.weight_friend, p.weight_moving
        empties = np.flatnonzero(self.config._cell_agent < 0)

        xi_cur = self.same_count[self.colors, pos] / 8.0
        uc_cur = self._color_vec(xi_cur)
        if self.k > 0:
            denom = self.k * self.norm
            uf_cur = 1.0 - self.friend_steps[np.arange(num), pos] / denom
            uf = 1.0 - self.friend_steps[:, empties] / denom
        else:
            uf_cur = np.ones(num)
            uf = np.ones((num, empties.size))
        u_cur = wc * uc_cur + wf * uf_cur + wm * 1.0

        # a prospective destination never counts the agent itself as neighbour
        self_adj = self.adj[pos][:, empties].astype(np.int64)
        xi = (self.same_count[self.colors[:, None], empties[None, :]] - self_adj) / 8.0
        uc = self._color_vec(xi)
        if p.gamma == 1:
            um = np.full((num, empties.size), 1.0 - p.c_bar)
        else:
            um = 1.0 - p.c_bar * (self.dstep[pos][:, empties] / self.norm)
        scores = wc * uc + wf * uf + wm * um
        return u_cur, empties, scores

    def apply_move(self, mover0: int, origin0: int, dest0: int) -> None:
        """Update the incremental tallies after the configuration changed."""
        c = int(self.colors[mover0])
        self.same_count[c][self.nbr[origin0]] -= 1
        self.same_count[c][self.nbr[dest0]] += 1
        if self.friends is not None:
            delta = self.dstep[dest0].astype(np.int64) - self.dstep[origin0].astype(np.int64)
            self.friend_steps[self.friends[mover0]] += delta[None, :]


def _pick(rng: np.random.Generator, candidates: np.ndarray) -> int:
    """Uniform draw; the RNG is only consulted when there is an actual tie."""
    if candidates.size == 1:
        return int(candidates[0])
    return int(candidates[rng.integers(candidates.size)])


def _step(state: SimState, engine: _Engine) -> StopReason | None:
    u_cur, empties, scores = engine.evaluate()
    if u_cur.size == 0 or empties.size == 0:
        return StopReason.CONVERGED
    best = scores.max(axis=1)
    improvers = np.flatnonzero(best > u_cur)
    if improvers.size == 0:
        return StopReason.CONVERGED
    worst = u_cur[improvers].min()
    mover0 = _pick(state.rng, improvers[u_cur[improvers] == worst])
    target = best[mover0]
    dest0 = _pick(state.rng, empties[scores[mover0] == target])

    before = float(u_cur[mover0])
    after = float(target)
    if not after > before:
        raise RuntimeError("invariant violation: chosen move does not improve the mover")
    origin0 = int(state.config._pos[mover0])
    state.config.move(mover0 + 1, cell_from_id(dest0 + 1, state.config.grid))
    engine.apply_move(mover0, origin0, dest0)
    state.t += 1
    state.moved_agents.add(mover0 + 1)
    if state.trace is not None:
        state.trace.append(
            StepRecord(state.t, mover0 + 1, origin0 + 1, dest0 + 1, before, after)
        )
    fingerprint = state.config.fingerprint()
    # membership is decided on the full byte string, so a hit is a genuine
    # configuration revisit, never a hash artefact
    if fingerprint in state.seen:
        return StopReason.LOOP_DETECTED
    state.seen.add(fingerprint)
    return None


def step(state: SimState, graph: FriendshipGraph, params: UtilityParams) -> StopReason | None:
    """Execute one relocation in place; returns a StopReason or None to continue.

    A state with no improvable agent is reported CONVERGED and left untouched.
    """
    return _step(state, _Engine(state.config, graph, params))


def best_improvement(
    agent: Agent | int,
    state: SimState,
    graph: FriendshipGraph,
    params: UtilityParams,
) -> tuple[CellRef, float] | None:
    """The agent's best strictly-better empty cell and its score, if any.

    Draws from the state RNG only when several empty cells tie for best.
    """
    agent_id = agent.id if isinstance(agent, Agent) else agent
    engine = _Engine(state.config, graph, params)
    u_cur, empties, scores = engine.evaluate()
    if empties.size == 0:
        return None
    row = scores[agent_id - 1]
    target = row.max()
    if not target > u_cur[agent_id - 1]:
        return None
    dest0 = _pick(state.rng, empties[row == target])
    return cell_from_id(dest0 + 1, state.config.grid), float(target)


def select_mover(
    state: SimState, graph: FriendshipGraph, params: UtilityParams
) -> Agent | None:
    """The unhappiest agent that can strictly improve, or None if converged."""
    engine = _Engine(state.config, graph, params)
    u_cur, empties, scores = engine.evaluate()
    if u_cur.size == 0 or empties.size == 0:
        return None
    best = scores.max(axis=1)
    improvers = np.flatnonzero(best > u_cur)
    if improvers.size == 0:
        return None
    worst = u_cur[improvers].min()
    mover0 = _pick(state.rng, improvers[u_cur[improvers] == worst])
    return state.config.agent(mover0 + 1)


def run(
    initial: Configuration,
    graph: FriendshipGraph,
    params: UtilityParams,
    max_iter: int | None = None,
    seed=0,
    collect_trace: bool = False,
) -> tuple[SimState, StopReason]:
    """Iterate steps from a copy of `initial` until a stop condition fires.

    max_iter defaults to 10 * n * n.  The input configuration is never
    mutated; the returned state owns its own copy.
    """
    if max_iter is None:
        max_iter = 10 * initial.grid.num_cells
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")
    state = SimState.start(initial, seed=seed, collect_trace=collect_trace)
    engine = _Engine(state.config, graph, params)
    while state.t < max_iter:
        reason = _step(state, engine)
        if reason is not None:
            return state, reason
    return state, StopReason.ITERATION_CAP
