"""Per-agent utility: colour composition, friend proximity, moving cost.

An agent evaluating a cell v scores

    U = beta * (alpha * U_color + (1 - alpha) * U_friend) + (1 - beta) * U_moving

where each component lies in [0, 1].  The colour share xi is the number of
same-colour Moore neighbours divided by 8 regardless of how many of the eight
cells are occupied.  When an agent evaluates a prospective destination its own
current cell is treated as vacated, so it never counts itself.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .geometry import CellRef, moore_neighborhood, torus_distance
from .population import Agent, Color, Configuration, FriendshipGraph


class ColorVariant(enum.Enum):
    """How the colour share xi maps to a utility."""

    LITERAL_STRICT = "literal-strict"  # xi if xi > x else 0
    LITERAL_NONSTRICT = "literal-nonstrict"  # xi if xi >= x else 0
    THRESHOLD_SATURATING = "threshold-saturating"  # 1 if xi >= x else xi

    @classmethod
    def parse(cls, text: str) -> "ColorVariant":
        for v in cls:
            if v.value == text:
                return v
        names = ", ".join(v.value for v in cls)
        raise ValueError(f"unknown color variant {text!r}; expected one of: {names}")


@dataclass(frozen=True)
class UtilityParams:
    """All preference parameters of a run.

    x is the colour tolerance threshold, alpha weighs colour against friends,
    beta weighs both against the cost of moving, gamma picks fixed (1) or
    distance-scaled (0) costs, and c_bar is the cost level.
    """

    x: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0
    gamma: int = 1
    c_bar: float = 0.5
    color_variant: ColorVariant = ColorVariant.THRESHOLD_SATURATING

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0):
            raise ValueError(f"x must lie in [0, 1], got {self.x}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.gamma not in (0, 1):
            raise ValueError(f"gamma must be 0 or 1, got {self.gamma}")
        if not (0.0 < self.c_bar < 1.0):
            raise ValueError(f"c_bar must lie strictly inside (0, 1), got {self.c_bar}")
        if not isinstance(self.color_variant, ColorVariant):
            raise ValueError("color_variant must be a ColorVariant")

    @property
    def weight_color(self) -> float:
        return self.beta * self.alpha

    @property
    def weight_friend(self) -> float:
        return self.beta * (1.0 - self.alpha)

    @property
    def weight_moving(self) -> float:
        return 1.0 - self.beta


@dataclass(frozen=True)
class NeighborhoodColorShares:
    """Red and blue shares of a cell's eight Moore neighbours."""

    xi_red: float
    xi_blue: float


def color_fractions(
    config: Configuration, cell: CellRef, excluding: Agent | int | None = None
) -> NeighborhoodColorShares:
    """Colour composition around a cell; denominator is always 8.

    With `excluding` set, that agent is ignored wherever it sits, which models
    the agent vacating its own cell while sizing up a destination.
    """
    skip = None
    if excluding is not None:
        skip = excluding.id if isinstance(excluding, Agent) else excluding
    reds = blues = 0
    for nb in moore_neighborhood(cell, config.grid):
        occ = config.occupant_of(nb)
        if occ is None or occ.id == skip:
            continue
        if occ.color == Color.RED:
            reds += 1
        else:
            blues += 1
    return NeighborhoodColorShares(reds / 8.0, blues / 8.0)


def _color_value(xi: float, x: float, variant: ColorVariant) -> float:
    if variant is ColorVariant.LITERAL_STRICT:
        return xi if xi > x else 0.0
    if variant is ColorVariant.LITERAL_NONSTRICT:
        return xi if xi >= x else 0.0
    return 1.0 if xi >= x else xi


def color_utility(
    agent: Agent | int, cell: CellRef, config: Configuration, params: UtilityParams
) -> float:
    """Colour component of the agent's utility at `cell` (own cell excluded)."""
    a = config.agent(agent.id if isinstance(agent, Agent) else agent)
    shares = color_fractions(config, cell, excluding=a)
    xi = shares.xi_red if a.color == Color.RED else shares.xi_blue
    return _color_value(xi, params.x, params.color_variant)


def friend_utility(
    agent: Agent | int, cell: CellRef, config: Configuration, graph: FriendshipGraph
) -> float:
    """1 minus the mean distance from `cell` to the agent's friends.

    Friends are taken at their current cells; an agent with no friends scores 1.
    """
    agent_id = agent.id if isinstance(agent, Agent) else agent
    friends = graph.friends_of(agent_id)
    if not friends:
        return 1.0
    total = 0.0
    for j in friends:
        total += torus_distance(config.cell_of(j), cell, config.grid)
    return 1.0 - total / len(friends)


def moving_utility(
    agent: Agent | int, cell: CellRef, config: Configuration, params: UtilityParams
) -> float:
    """1 for staying put; otherwise the cost of the move, subtracted from 1.

    gamma = 1 charges the flat rate c_bar, gamma = 0 charges c_bar scaled by
    the normalised distance of the move, so short hops stay cheap.
    """
    origin = config.cell_of(agent)
    if origin.id == cell.id:
        return 1.0
    if params.gamma == 1:
        return 1.0 - params.c_bar
    return 1.0 - params.c_bar * torus_distance(origin, cell, config.grid)


@dataclass(frozen=True)
class UtilityBreakdown:
    """Raw components, their weighted shares, and the total."""

    color: float
    friend: float
    moving: float
    weighted_color: float
    weighted_friend: float
    weighted_moving: float
    total: float


def total_utility(
    agent: Agent | int,
    cell: CellRef,
    config: Configuration,
    graph: FriendshipGraph,
    params: UtilityParams,
) -> UtilityBreakdown:
    """Full weighted utility of the agent at `cell`, components included."""
    uc = color_utility(agent, cell, config, params)
    uf = friend_utility(agent, cell, config, graph)
    um = moving_utility(agent, cell, config, params)
    wc = params.weight_color * uc
    wf = params.weight_friend * uf
    wm = params.weight_moving * um
    return UtilityBreakdown(uc, uf, um, wc, wf, wm, wc + wf + wm)
