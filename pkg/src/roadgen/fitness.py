"""Weighted scalar objective (lower is better) shared by every generator."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

from .metrics import MetricReport, full_report

# Returned for grids without any road; compares worse than every real grid.
INVALID_FITNESS = math.inf


@dataclass(frozen=True)
class FitnessWeights:
    w_dead_ends: float = 480.0
    w_components: float = 300.0
    w_boundary: float = 150.0
    w_bridges: float = 100.0
    w_adjacent_crossings: float = 100.0
    w_adjacent_turns: float = 80.0
    w_cyclomatic_bonus: float = 2.0
    w_straight_bonus: float = 2.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"weight {f.name} must be a finite number, got {v!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitnessWeights":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown fitness weights {sorted(unknown)}; valid names: {sorted(known)}")
        return cls(**{k: float(v) for k, v in d.items()})

    @classmethod
    def from_json(cls, path) -> "FitnessWeights":
        """Load ``{"weights": {...}}``; unspecified weights keep their defaults."""
        with open(path) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict) or not isinstance(doc.get("weights", {}), dict):
            raise ValueError(f"{path}: expected an object with a 'weights' mapping")
        return cls.from_dict(doc.get("weights", {}))

    def with_overrides(self, **kw) -> "FitnessWeights":
        return self.from_dict({**self.to_dict(), **kw})


DEFAULT_WEIGHTS = FitnessWeights()


def is_valid(value: float) -> bool:
    return math.isfinite(value)


def fitness(report: MetricReport, weights: FitnessWeights = DEFAULT_WEIGHTS) -> float:
    if report.connected_components == 0:
        return INVALID_FITNESS
    w = weights
    return float(
        w.w_dead_ends * report.dead_ends
        + w.w_components * (report.connected_components - 1)
        + w.w_boundary * report.boundary_violations
        + w.w_bridges * report.bridges
        + w.w_adjacent_crossings * report.adjacent_crossing_violation_score
        + w.w_adjacent_turns * report.adjacent_turns
        - w.w_cyclomatic_bonus * report.cyclomatic_complexity
        - w.w_straight_bonus * report.straight_run_score
    )


def grid_fitness(cells, weights: FitnessWeights = DEFAULT_WEIGHTS) -> tuple[float, MetricReport]:
    report = full_report(cells)
    return fitness(report, weights), report
