"""Torus geometry: cell addressing, Moore neighborhoods, wrapped distances.

Cells of an n x n grid are addressed by 1-based (row, col) pairs or by the
linear id v = (row - 1) * n + col, also 1-based.  Both edges of the board wrap,
so every cell has exactly eight Moore neighbours and no cell is special.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

# The eight Moore offsets, row-major order.
_MOORE_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)


@dataclass(frozen=True)
class CellRef:
    """A single cell: 1-based row/col plus the linear id they map to."""

    row: int
    col: int
    id: int


@dataclass(frozen=True)
class TorusGrid:
    """Square n x n board with both pairs of opposite edges identified."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 3:
            raise ValueError(f"grid side must be an integer >= 3, got {self.n!r}")

    @property
    def num_cells(self) -> int:
        return self.n * self.n

    def cell(self, row: int, col: int) -> CellRef:
        return cell_id(row, col, self)

    def cell_by_id(self, id: int) -> CellRef:
        return cell_from_id(id, self)

    def cells(self):
        """All cells in ascending id order."""
        for v in range(1, self.num_cells + 1):
            yield cell_from_id(v, self)


def cell_id(row: int, col: int, grid: TorusGrid) -> CellRef:
    """Build the cell at 1-based (row, col); rejects out-of-range coordinates."""
    n = grid.n
    if not (1 <= row <= n) or not (1 <= col <= n):
        raise ValueError(f"(row, col) = ({row}, {col}) outside 1..{n}")
    return CellRef(row, col, (row - 1) * n + col)


def cell_from_id(id: int, grid: TorusGrid) -> CellRef:
    """Inverse of cell_id: recover (row, col) from a 1-based linear id."""
    if not (1 <= id <= grid.num_cells):
        raise ValueError(f"cell id {id} outside 1..{grid.num_cells}")
    row, col = divmod(id - 1, grid.n)
    return CellRef(row + 1, col + 1, id)


def moore_neighborhood(cell: CellRef, grid: TorusGrid) -> frozenset[CellRef]:
    """The eight cells reachable by one king move, wrapping at the edges."""
    n = grid.n
    out = []
    for dr, dc in _MOORE_OFFSETS:
        r = (cell.row - 1 + dr) % n + 1
        c = (cell.col - 1 + dc) % n + 1
        out.append(cell_id(r, c, grid))
    return frozenset(out)


def _axis_steps(a: int, b: int, n: int) -> int:
    d = abs(a - b)
    return min(d, n - d)


def distance_norm(n: int) -> int:
    """Normalising constant: n for even n, n - 1 for odd n.

    With this choice the largest wrapped taxicab separation on the board is
    exactly 1.0 for either parity.
    """
    return n if n % 2 == 0 else n - 1


def torus_distance(a: CellRef, b: CellRef, grid: TorusGrid) -> float:
    """Normalised wrapped taxicab distance in [0, 1]."""
    steps = _axis_steps(a.row, b.row, grid.n) + _axis_steps(a.col, b.col, grid.n)
    return steps / distance_norm(grid.n)


# ===== cached lookup tables =====
# These back the vectorised simulation and metric code.  Everything is keyed
# by n alone and marked read-only so the caches can be shared freely.


@functools.lru_cache(maxsize=None)
def neighbor_table(n: int) -> np.ndarray:
    """(n*n, 8) array: row v lists the 0-based ids of cell v's Moore neighbours."""
    TorusGrid(n)  # reuse the validation
    idx = np.arange(n * n)
    r, c = divmod(idx, n)
    cols = []
    for dr, dc in _MOORE_OFFSETS:
        cols.append(((r + dr) % n) * n + (c + dc) % n)
    table = np.stack(cols, axis=1)
    table.flags.writeable = False
    return table


@functools.lru_cache(maxsize=None)
def adjacency_matrix(n: int) -> np.ndarray:
    """(n*n, n*n) boolean Moore adjacency; symmetric with a zero diagonal."""
    table = neighbor_table(n)
    m = n * n
    adj = np.zeros((m, m), dtype=bool)
    rows = np.repeat(np.arange(m), 8)
    adj[rows, table.ravel()] = True
    adj.flags.writeable = False
    return adj


@functools.lru_cache(maxsize=None)
def distance_step_matrix(n: int) -> np.ndarray:
    """(n*n, n*n) wrapped taxicab step counts, before normalisation.

    Entries are small exact integers, which keeps incremental bookkeeping in
    the simulation free of rounding error.
    """
    idx = np.arange(n * n)
    r, c = divmod(idx, n)
    dr = np.abs(r[:, None] - r[None, :])
    dc = np.abs(c[:, None] - c[None, :])
    steps = np.minimum(dr, n - dr) + np.minimum(dc, n - dc)
    steps = steps.astype(np.int16)
    steps.flags.writeable = False
    return steps
