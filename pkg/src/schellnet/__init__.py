"""Chequerboard segregation dynamics with friendship networks and moving costs.

A deterministic, seed-reproducible simulator of two-colour relocation
dynamics on a torus, where agents weigh the colour mix of their
neighbourhood, the distance to their friends, and the cost of moving.
Includes segregation and welfare metrics plus an experiment harness for
replicated parameter sweeps.
"""

from .dynamics import SimState, StepRecord, StopReason, best_improvement, run, select_mover, step
from .geometry import (
    CellRef,
    TorusGrid,
    cell_from_id,
    cell_id,
    moore_neighborhood,
    torus_distance,
)
from .harness import (
    DEFAULT_BASE_SEED,
    ExperimentSpec,
    SweepPoint,
    SweepResult,
    aggregate,
    derive_seed,
    list_presets,
    preset,
    run_experiment,
    run_replicate,
)
from .metrics import (
    ContiguityGraph,
    OutcomeRecord,
    WelfareSummary,
    collect_outcome,
    contiguity_graph,
    freeman_detail,
    freeman_index,
    gearys_c,
    morans_i,
    welfare,
)
from .population import (
    Agent,
    Color,
    Configuration,
    FriendshipGraph,
    build_one_factorization,
    friendship_graph,
    init_configuration,
)
from .utility import (
    ColorVariant,
    UtilityParams,
    color_fractions,
    color_utility,
    friend_utility,
    moving_utility,
    total_utility,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "CellRef",
    "Color",
    "ColorVariant",
    "Configuration",
    "ContiguityGraph",
    "DEFAULT_BASE_SEED",
    "ExperimentSpec",
    "FriendshipGraph",
    "OutcomeRecord",
    "SimState",
    "StepRecord",
    "StopReason",
    "SweepPoint",
    "SweepResult",
    "TorusGrid",
    "UtilityParams",
    "WelfareSummary",
    "aggregate",
    "best_improvement",
    "build_one_factorization",
    "cell_from_id",
    "cell_id",
    "collect_outcome",
    "color_fractions",
    "color_utility",
    "contiguity_graph",
    "derive_seed",
    "freeman_detail",
    "freeman_index",
    "friend_utility",
    "friendship_graph",
    "gearys_c",
    "init_configuration",
    "list_presets",
    "moore_neighborhood",
    "morans_i",
    "moving_utility",
    "preset",
    "run",
    "run_experiment",
    "run_replicate",
    "select_mover",
    "step",
    "torus_distance",
    "total_utility",
    "welfare",
]
