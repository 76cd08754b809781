"""4-bit tile encoding.

A tile code packs road connections as ``8*N + 4*E + 2*S + 1*W``. Code 0 is
the empty (background) cell.
"""
from __future__ import annotations

import enum

import numpy as np

N_CODES = 16
EMPTY = 0


class Direction(enum.IntEnum):
    """Cardinal direction; the value is the bit it occupies in a tile code."""

    N = 8
    E = 4
    S = 2
    W = 1

    @property
    def bit(self) -> int:
        return int(self.value)

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITE[self]

    @property
    def offset(self) -> tuple[int, int]:
        """(row, col) step toward the neighbour in this direction."""
        return _OFFSET[self]


_OPPOSITE = {Direction.N: Direction.S, Direction.S: Direction.N,
             Direction.E: Direction.W, Direction.W: Direction.E}
_OFFSET = {Direction.N: (-1, 0), Direction.E: (0, 1),
           Direction.S: (1, 0), Direction.W: (0, -1)}

# scan order used wherever determinism matters
DIRECTIONS = (Direction.N, Direction.E, Direction.S, Direction.W)


class TileClass(enum.Enum):
    EMPTY = "empty"
    DEAD_END = "dead_end"
    STRAIGHT = "straight"
    TURN = "turn"
    CROSSING3 = "crossing3"
    CROSSING4 = "crossing4"


STRAIGHT_NS = 10
STRAIGHT_EW = 5


def check_code(t) -> int:
    t = int(t)
    if not 0 <= t < N_CODES:
        raise ValueError(f"tile code must be in [0, 15], got {t}")
    return t


def encode(b_n: int, b_e: int, b_s: int, b_w: int) -> int:
    for b in (b_n, b_e, b_s, b_w):
        if b not in (0, 1):
            raise ValueError(f"connection flags must be 0 or 1, got {b}")
    return 8 * b_n + 4 * b_e + 2 * b_s + b_w


def decode(t: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`encode`: ``(b_n, b_e, b_s, b_w)``."""
    t = check_code(t)
    return (t >> 3) & 1, (t >> 2) & 1, (t >> 1) & 1, t & 1


def degree(t: int) -> int:
    return bin(check_code(t)).count("1")


def has(t: int, d: Direction) -> bool:
    return bool(t & d.bit)


def rotate_cw(t: int) -> int:
    """Rotate a tile a quarter turn clockwise (W->N, N->E, E->S, S->W)."""
    t = check_code(t)
    return ((t & 1) << 3) | (t >> 1)


def rotate_ccw(t: int) -> int:
    t = check_code(t)
    return ((t << 1) & 0b1110) | (t >> 3)


def classify(t: int) -> TileClass:
    k = degree(t)
    if k == 0:
        return TileClass.EMPTY
    if k == 1:
        return TileClass.DEAD_END
    if k == 2:
        return TileClass.STRAIGHT if t in (STRAIGHT_NS, STRAIGHT_EW) else TileClass.TURN
    return TileClass.CROSSING3 if k == 3 else TileClass.CROSSING4


def compatible(a: int, b: int, d: Direction) -> bool:
    """Whether ``b`` may sit next to ``a`` in direction ``d`` (as seen from ``a``)."""
    d = Direction(d)
    return has(check_code(a), d) == has(check_code(b), d.opposite)


# lookup tables for vectorised code
DEGREE = np.array([bin(c).count("1") for c in range(N_CODES)], dtype=np.int64)
ROTATE_CW = np.array([((c & 1) << 3) | (c >> 1) for c in range(N_CODES)], dtype=np.int64)
IS_TURN = np.array([classify(c) is TileClass.TURN for c in range(N_CODES)])
IS_CROSSING = DEGREE >= 3
CROSSING_CODES = tuple(c for c in range(N_CODES) if DEGREE[c] >= 3)
NONEMPTY_CODES = tuple(range(1, N_CODES))


def rotate_grid_cw(cells: np.ndarray) -> np.ndarray:
    """Rotate a whole grid clockwise: the layout turns and so does every tile."""
    return ROTATE_CW[np.rot90(np.asarray(cells), k=-1)]
