"""Connectivity repair: restore border reciprocity and clear off-grid bits.

Cells flagged in the dirty mask are scanned row-major, directions N, E, S, W.
At a disagreeing border the *neighbour* is rewritten to the code one bit
away that agrees with the visited cell, and becomes dirty itself. A bit
pointing off the grid is cleared on the visited cell. Passes repeat until one
makes no change or the iteration budget runs out.

With ``keep_nonempty`` the repair never empties a non-empty tile: when the
fix would erase a neighbour's last connection, the visited cell connects to
it instead, and a tile whose only bits pointed off-grid is turned toward an
in-grid neighbour.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._kernels import repair_inplace
from .grid import check_grid


class RepairResult(NamedTuple):
    grid: np.ndarray
    iterations: int
    converged: bool


def default_max_iterations(shape) -> int:
    return 4 * shape[0] * shape[1]


def repair(cells, mask, max_iterations: int | None = None, *,
           keep_nonempty: bool = False) -> RepairResult:
    g = check_grid(cells).copy()
    m = np.array(mask, dtype=np.bool_)
    if m.shape != g.shape:
        raise ValueError(f"dirty mask shape {m.shape} does not match grid shape {g.shape}")
    if max_iterations is None:
        max_iterations = default_max_iterations(g.shape)
    if max_iterations < 1:
        raise ValueError("max_iterations must be positive")
    iterations, converged = repair_inplace(g, m, int(max_iterations), bool(keep_nonempty))
    return RepairResult(g, int(iterations), bool(converged))


def repair_full(cells, max_iterations: int | None = None, *,
                keep_nonempty: bool = False) -> RepairResult:
    g = check_grid(cells)
    return repair(g, np.ones(g.shape, dtype=np.bool_), max_iterations,
                  keep_nonempty=keep_nonempty)
