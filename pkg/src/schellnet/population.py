"""Agents, board occupancy, and the friendship network.

Agents carry a fixed colour and a 1-based id: ids 1..A are red, A+1..A+B are
blue.  A Configuration is the mutable assignment of agents to cells.  The
friendship network is a k-regular graph on all agents obtained as the union of
the first k rounds of a randomly relabelled round-robin schedule, so the edge
sets for successive k are nested.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .geometry import CellRef, TorusGrid, cell_from_id


class Color(enum.IntEnum):
    RED = 0
    BLUE = 1

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Agent:
    id: int
    color: Color


class Configuration:
    """Who sits where on a torus grid.

    Internally positions live in 0-based numpy arrays; everything visible
    through the public methods speaks 1-based CellRef / agent ids.
    """

    def __init__(self, grid: TorusGrid, colors: np.ndarray, positions: np.ndarray):
        colors = np.asarray(colors, dtype=np.int8)
        positions = np.asarray(positions, dtype=np.int64)
        if colors.shape != positions.shape or colors.ndim != 1:
            raise ValueError("colors and positions must be 1-d arrays of equal length")
        if positions.size and (positions.min() < 0 or positions.max() >= grid.num_cells):
            raise ValueError("agent position outside the grid")
        if len(np.unique(positions)) != positions.size:
            raise ValueError("two agents share a cell")
        self.grid = grid
        self._colors = colors
        self._colors.flags.writeable = False
        self._pos = positions.copy()
        self._cell_agent = np.full(grid.num_cells, -1, dtype=np.int64)
        self._cell_agent[self._pos] = np.arange(positions.size)

    # ----- constructors -----

    @classmethod
    def from_cells(cls, grid: TorusGrid, red_cells, blue_cells) -> "Configuration":
        """Build a configuration from explicit (row, col) pairs or CellRefs."""

        def to_index(c):
            if isinstance(c, CellRef):
                return c.id - 1
            row, col = c
            return grid.cell(row, col).id - 1

        reds = [to_index(c) for c in red_cells]
        blues = [to_index(c) for c in blue_cells]
        colors = np.array([Color.RED] * len(reds) + [Color.BLUE] * len(blues), dtype=np.int8)
        return cls(grid, colors, np.array(reds + blues, dtype=np.int64))

    # ----- read access -----

    @property
    def num_agents(self) -> int:
        return self._pos.size

    @property
    def counts(self) -> tuple[int, int]:
        reds = int(np.count_nonzero(self._colors == Color.RED))
        return reds, self.num_agents - reds

    def agent(self, agent_id: int) -> Agent:
        self._check_agent(agent_id)
        return Agent(agent_id, Color(int(self._colors[agent_id - 1])))

    def agents(self):
        for i in range(self.num_agents):
            yield Agent(i + 1, Color(int(self._colors[i])))

    def cell_of(self, agent: Agent | int) -> CellRef:
        agent_id = agent.id if isinstance(agent, Agent) else agent
        self._check_agent(agent_id)
        return cell_from_id(int(self._pos[agent_id - 1]) + 1, self.grid)

    def occupant_of(self, cell: CellRef) -> Agent | None:
        i = int(self._cell_agent[cell.id - 1])
        return None if i < 0 else Agent(i + 1, Color(int(self._colors[i])))

    def is_empty(self, cell: CellRef) -> bool:
        return self._cell_agent[cell.id - 1] < 0

    def empty_cells(self) -> tuple[CellRef, ...]:
        """Unoccupied cells in ascending id order."""
        free = np.flatnonzero(self._cell_agent < 0)
        return tuple(cell_from_id(int(v) + 1, self.grid) for v in free)

    # ----- mutation -----

    def move(self, agent: Agent | int, dest: CellRef) -> None:
        """Relocate one agent to an empty destination cell."""
        agent_id = agent.id if isinstance(agent, Agent) else agent
        self._check_agent(agent_id)
        i = agent_id - 1
        d = dest.id - 1
        if self._cell_agent[d] >= 0:
            raise ValueError(f"destination cell {dest.id} is occupied")
        self._cell_agent[self._pos[i]] = -1
        self._cell_agent[d] = i
        self._pos[i] = d

    def copy(self) -> "Configuration":
        return Configuration(self.grid, self._colors, self._pos)

    def fingerprint(self) -> bytes:
        """Raw bytes of the full agent -> cell map; equal bytes, equal state."""
        return self._pos.astype(np.int32).tobytes()

    def validate(self) -> None:
        """Check that the two occupancy maps are mutual inverses."""
        occupied = np.flatnonzero(self._cell_agent >= 0)
        if occupied.size != self.num_agents:
            raise AssertionError("occupied cell count does not match agent count")
        if not np.array_equal(self._pos[self._cell_agent[occupied]], occupied):
            raise AssertionError("cell->agent and agent->cell maps disagree")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.grid.n == other.grid.n
            and np.array_equal(self._colors, other._colors)
            and np.array_equal(self._pos, other._pos)
        )

    def _check_agent(self, agent_id: int) -> None:
        if not (1 <= agent_id <= self.num_agents):
            raise ValueError(f"agent id {agent_id} outside 1..{self.num_agents}")


def init_configuration(seed: int, grid: TorusGrid, counts: tuple[int, int]) -> Configuration:
    """Place A red and B blue agents on distinct uniformly random cells.

    At least one cell is left empty; identical seeds give identical placements.
    """
    reds, blues = counts
    if reds < 0 or blues < 0:
        raise ValueError("agent counts must be non-negative")
    total = reds + blues
    if total > grid.num_cells - 1:
        raise ValueError(
            f"{total} agents do not fit on {grid.num_cells} cells with one left empty"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.choice(grid.num_cells, size=total, replace=False)
    colors = np.array([Color.RED] * reds + [Color.BLUE] * blues, dtype=np.int8)
    return Configuration(grid, colors, chosen.astype(np.int64))


# ===== friendship network =====


def build_one_factorization(seed: int, num_agents: int) -> list[list[tuple[int, int]]]:
    """Partition the complete graph on num_agents vertices into perfect matchings.

    Uses the classic circle construction: one vertex sits at the hub, the rest
    on a circle that rotates once per round, giving num_agents - 1 rounds of
    num_agents / 2 disjoint edges.  Vertices are relabelled by a seeded random
    permutation first so different seeds give different (isomorphic) schedules.
    """
    m = num_agents
    if m < 2 or m % 2 != 0:
        raise ValueError(f"a one-factorization needs an even number >= 2, got {m}")
    rng = np.random.default_rng(seed)
    label = rng.permutation(m)  # circle position -> 0-based agent index

    def edge(p: int, q: int) -> tuple[int, int]:
        a, b = int(label[p]) + 1, int(label[q]) + 1
        return (a, b) if a < b else (b, a)

    rounds = []
    for r in range(m - 1):
        pairs = [edge(m - 1, r)]  # hub pairs with the rotating slot
        for i in range(1, m // 2):
            pairs.append(edge((r + i) % (m - 1), (r - i) % (m - 1)))
        rounds.append(sorted(pairs))
    return rounds


@dataclass(frozen=True)
class FriendshipGraph:
    """Undirected k-regular friendship relation over all agents."""

    num_agents: int
    degree: int
    edges: frozenset = field(repr=False)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """(num_agents, num_agents) boolean matrix, 0-based, read-only."""
        adj = np.zeros((self.num_agents, self.num_agents), dtype=bool)
        for a, b in self.edges:
            adj[a - 1, b - 1] = True
            adj[b - 1, a - 1] = True
        adj.flags.writeable = False
        return adj

    def friends_of(self, agent_id: int) -> tuple[int, ...]:
        """Sorted 1-based ids of the agent's friends."""
        if not (1 <= agent_id <= self.num_agents):
            raise ValueError(f"agent id {agent_id} outside 1..{self.num_agents}")
        return tuple(int(j) + 1 for j in np.flatnonzero(self.adjacency[agent_id - 1]))

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def friendship_graph(seed: int, k: int, num_agents: int) -> FriendshipGraph:
    """The union of the first k matchings of a seeded one-factorization.

    The result is exactly k-regular, and for fixed seed the edge set at degree
    k is contained in the edge set at degree k + 1.  k = 0 is the empty graph
    and is allowed for any population; k > 0 requires an even population.
    """
    if num_agents < 0:
        raise ValueError("num_agents must be non-negative")
    if k == 0:
        return FriendshipGraph(num_agents, 0, frozenset())
    if not (0 <= k <= num_agents - 1):
        raise ValueError(f"degree k={k} outside 0..{num_agents - 1}")
    if num_agents % 2 != 0:
        raise ValueError("k > 0 needs an even number of agents")
    rounds = build_one_factorization(seed, num_agents)
    edges = frozenset(pair for r in rounds[:k] for pair in r)
    return FriendshipGraph(num_agents, k, edges)
