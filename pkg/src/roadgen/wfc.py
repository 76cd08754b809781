"""Wave Function Collapse over the 16-code tile alphabet.

Each cell holds its remaining possibilities as a 16-bit mask. The
uncollapsed cell with the fewest possibilities (row-major on ties) is
collapsed to a uniformly drawn member, and its direct neighbours drop every
code that cannot face it. A contradiction aborts the attempt; the generator
restarts up to ``max_attempts`` times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .tiles import DIRECTIONS, IS_CROSSING, N_CODES

ALL_CODES = (1 << N_CODES) - 1
POPCOUNT = np.array([bin(m).count("1") for m in range(1 << N_CODES)], dtype=np.int64)
CROSSING_SET = sum(1 << c for c in range(N_CODES) if IS_CROSSING[c])


def _code_set(pred) -> int:
    return sum(1 << c for c in range(N_CODES) if pred(c))


# ALLOWED[a][k]: codes that may sit in direction DIRECTIONS[k] of code a
ALLOWED = [[_code_set(lambda b, a=a, d=d: bool(a & d.bit) == bool(b & d.opposite.bit))
            for d in DIRECTIONS] for a in range(N_CODES)]
# codes without a connection in direction k
WITHOUT = [_code_set(lambda c, d=d: not c & d.bit) for d in DIRECTIONS]


class WfcFailure(RuntimeError):
    """Every attempt hit a contradiction."""

    def __init__(self, attempts: int, cell: tuple[int, int]):
        super().__init__(f"WFC failed after {attempts} attempts; last contradiction at cell {cell}")
        self.attempts = attempts
        self.cell = cell


@dataclass
class WfcConfig:
    max_attempts: int = 10
    forbid_adjacent_crossings: bool = True
    hard_boundary: bool = False
    allow_empty: bool = False
    seed: Optional[int] = None

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def members(mask: int) -> list[int]:
    return [c for c in range(N_CODES) if mask >> c & 1]


def initial_possibilities(height: int, width: int, cfg: WfcConfig) -> np.ndarray:
    base = ALL_CODES if cfg.allow_empty else ALL_CODES & ~1
    poss = np.full((height, width), base, dtype=np.int64)
    if cfg.hard_boundary:
        poss[0, :] &= WITHOUT[0]
        poss[:, -1] &= WITHOUT[1]
        poss[-1, :] &= WITHOUT[2]
        poss[:, 0] &= WITHOUT[3]
    return poss


def _attempt(height, width, cfg, rng, on_step):
    """One collapse run. Returns ``(grid, None)`` or ``(None, contradiction_cell)``."""
    poss = initial_possibilities(height, width, cfg)
    empty = np.flatnonzero(poss.ravel() == 0)
    if empty.size:
        return None, divmod(int(empty[0]), width)
    grid = np.zeros((height, width), dtype=np.int64)
    collapsed = np.zeros((height, width), dtype=np.bool_)
    for _ in range(height * width):
        entropy = np.where(collapsed, N_CODES + 1, POPCOUNT[poss])
        r, c = divmod(int(np.argmin(entropy)), width)
        options = members(int(poss[r, c]))
        code = options[int(rng.integers(len(options)))]
        grid[r, c] = code
        poss[r, c] = 1 << code
        collapsed[r, c] = True
        for k, d in enumerate(DIRECTIONS):
            nr, nc = r + d.offset[0], c + d.offset[1]
            if not (0 <= nr < height and 0 <= nc < width) or collapsed[nr, nc]:
                continue
            allowed = ALLOWED[code][k]
            if cfg.forbid_adjacent_crossings and IS_CROSSING[code] and code & d.bit:
                # a connected neighbour of a crossing may not be a crossing
                allowed &= ~CROSSING_SET
            poss[nr, nc] &= allowed
            if poss[nr, nc] == 0:
                return None, (nr, nc)
        if on_step is not None:
            on_step(poss.copy(), collapsed.copy())
    return grid, None


def wfc_run(height: int, width: int, cfg: WfcConfig | None = None, *, rng=None,
            on_step: Callable | None = None) -> tuple[np.ndarray, int]:
    """Generate a grid; returns ``(grid, attempts_used)`` or raises :class:`WfcFailure`.

    ``on_step(possibilities, collapsed)`` is called after every collapse and
    propagation, for instrumentation.
    """
    cfg = cfg or WfcConfig()
    if height < 2 or width < 2:
        raise ValueError("WFC needs height and width >= 2")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    cell = None
    for attempt in range(1, cfg.max_attempts + 1):
        grid, cell = _attempt(height, width, cfg, rng, on_step)
        if grid is not None:
            return grid, attempt
    raise WfcFailure(cfg.max_attempts, cell)


def wfc_generate(height: int, width: int, cfg: WfcConfig | None = None) -> np.ndarray:
    return wfc_run(height, width, cfg)[0]
