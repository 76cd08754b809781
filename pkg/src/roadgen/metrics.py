"""Structural metrics of a tile grid and the behaviour descriptor built on them."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np

from ._kernels import graph_stats, tile_stats
from .grid import check_grid, reciprocal_edges
from .tiles import DEGREE, IS_CROSSING, IS_TURN, STRAIGHT_EW, STRAIGHT_NS


@dataclass(frozen=True)
class MetricReport:
    connected_components: int
    cyclomatic_complexity: int
    dead_ends: int
    boundary_violations: int
    bridges: int
    adjacent_crossing_violation_score: int
    adjacent_crossing_pairs: int
    adjacent_turns: int
    straight_run_score: int
    crossings: int
    coverage: float
    edges: int
    nodes: int

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        kw = {}
        for f in fields(cls):
            kw[f.name] = float(d[f.name]) if f.name == "coverage" else int(d[f.name])
        return cls(**kw)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


class BehaviorDescriptor(NamedTuple):
    components: int
    cyclomatic: int
    dangling: int
    adjacent_crossings: int
    adjacent_turns: int


def connected_components(cells) -> int:
    """Number of connected road networks (isolated non-empty tiles count)."""
    return int(graph_stats(check_grid(cells))[2])


def cyclomatic_complexity(cells) -> int:
    """``E - N + P`` of the road graph."""
    nodes, edges, comps, _, _ = graph_stats(check_grid(cells))
    return int(edges - nodes + comps)


def bridges(cells) -> int:
    """Number of cut-edges in the road graph."""
    return int(graph_stats(check_grid(cells))[3])


def dead_ends(cells) -> int:
    """Nodes with exactly one reciprocated connection."""
    g = check_grid(cells)
    degree = graph_stats(g)[4]
    return int(np.count_nonzero((degree == 1) & (g > 0)))


def boundary_violations(cells) -> int:
    """Connection bits that point off the grid."""
    g = check_grid(cells)
    return int(np.count_nonzero(g[0, :] & 8) + np.count_nonzero(g[-1, :] & 2)
               + np.count_nonzero(g[:, 0] & 1) + np.count_nonzero(g[:, -1] & 4))


def _connected_pairs(g: np.ndarray, kind: np.ndarray):
    """Yield ``(a_codes, b_codes)`` for edge-joined neighbour pairs where both
    tiles satisfy the lookup table ``kind``."""
    horizontal, vertical = reciprocal_edges(g)
    left, right = g[:, :-1], g[:, 1:]
    top, bottom = g[:-1, :], g[1:, :]
    h = horizontal & kind[left] & kind[right]
    v = vertical & kind[top] & kind[bottom]
    return (np.concatenate([left[h], top[v]]), np.concatenate([right[h], bottom[v]]))


def adjacent_crossing_pairs(cells) -> int:
    """Connected neighbour pairs of tiles that both have 3+ connections."""
    a, _ = _connected_pairs(check_grid(cells), IS_CROSSING)
    return int(a.size)


def adjacent_crossing_violation_score(cells) -> int:
    """Adjacent connected crossings, each pair weighted by its summed tile degree."""
    a, b = _connected_pairs(check_grid(cells), IS_CROSSING)
    return int(DEGREE[a].sum() + DEGREE[b].sum())


def adjacent_turns(cells) -> int:
    """Connected neighbour pairs of turn tiles (zig-zags)."""
    a, _ = _connected_pairs(check_grid(cells), IS_TURN)
    return int(a.size)


def _sum_squared_runs(mask: np.ndarray) -> int:
    # L^2 == sum of (2k - 1) over positions k = 1..L of a run
    total = 0
    run = np.zeros(mask.shape[0], dtype=np.int64)
    for j in range(mask.shape[1]):
        col = mask[:, j]
        run = np.where(col, run + 1, 0)
        total += int((2 * run[col] - 1).sum())
    return total


def straight_run_score(cells) -> int:
    """Sum of squared lengths of horizontal code-5 runs and vertical code-10 runs."""
    g = check_grid(cells)
    return _sum_squared_runs(g == STRAIGHT_EW) + _sum_squared_runs((g == STRAIGHT_NS).T)


def crossings(cells) -> int:
    return int(np.count_nonzero(IS_CROSSING[check_grid(cells)]))


def coverage(cells) -> float:
    g = check_grid(cells)
    return float(np.count_nonzero(g)) / g.size


def full_report(cells) -> MetricReport:
    g = check_grid(cells)
    nodes, edges, comps, n_bridges, degree = graph_stats(g)
    bv, score, pairs, turns, straight, n_crossings, nonempty = tile_stats(g)
    return MetricReport(
        connected_components=int(comps),
        cyclomatic_complexity=int(edges - nodes + comps),
        dead_ends=int(np.count_nonzero((degree == 1) & (g > 0))),
        boundary_violations=int(bv),
        bridges=int(n_bridges),
        adjacent_crossing_violation_score=int(score),
        adjacent_crossing_pairs=int(pairs),
        adjacent_turns=int(turns),
        straight_run_score=int(straight),
        crossings=int(n_crossings),
        coverage=int(nonempty) / g.size,
        edges=int(edges),
        nodes=int(nodes),
    )


def behavior_descriptor(report: MetricReport) -> BehaviorDescriptor:
    return BehaviorDescriptor(
        components=report.connected_components,
        cyclomatic=report.cyclomatic_complexity,
        dangling=report.dead_ends,
        adjacent_crossings=report.adjacent_crossing_pairs,
        adjacent_turns=report.adjacent_turns,
    )
