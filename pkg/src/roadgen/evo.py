"""Evolutionary search with an optional MAP-Elites archive.

Parents are picked by tournament, mutated (tile change and/or crossing
insertion), repaired and scored. Survivors are the best ``mu`` of parents
plus offspring. With ``map_elites`` every offspring is also offered to an
archive keyed by its quantized behaviour descriptor; the archive is passive
and never feeds parents back into the population.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .fitness import DEFAULT_WEIGHTS, FitnessWeights, fitness
from .grid import check_grid, to_dict
from .metrics import BehaviorDescriptor, MetricReport, behavior_descriptor, full_report
from .repair import repair_full
from .tiles import CROSSING_CODES, N_CODES

CYCLOMATIC_BINS = 25
MAX_NICHES = CYCLOMATIC_BINS * 2 ** 4


class NicheIndex(NamedTuple):
    cyclomatic: int
    components: int
    dangling: int
    adjacent_crossings: int
    adjacent_turns: int


@dataclass
class EvoConfig:
    mu: int = 40
    lambda_: int = 40
    generations: int = 200
    tournament_size: int = 3
    p_tile_change: float = 0.7
    p_crossing_insert: float = 0.5
    mutation_rate: float = 0.3
    map_elites: bool = False
    full_coverage: bool = True
    seed: Optional[int] = None

    def __post_init__(self):
        if self.mu < 1 or self.lambda_ < 1:
            raise ValueError("mu and lambda must be >= 1")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        for name in ("p_tile_change", "p_crossing_insert", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")


@dataclass
class Individual:
    grid: np.ndarray
    fitness: float
    report: MetricReport
    descriptor: BehaviorDescriptor

    @classmethod
    def from_grid(cls, grid, weights: FitnessWeights = DEFAULT_WEIGHTS) -> "Individual":
        g = check_grid(grid)
        report = full_report(g)
        return cls(g, fitness(report, weights), report, behavior_descriptor(report))


def quantize(b: BehaviorDescriptor) -> NicheIndex:
    return NicheIndex(
        cyclomatic=min(max(int(b.cyclomatic), 0), CYCLOMATIC_BINS - 1),
        components=int(b.components - 1 != 0),
        dangling=int(b.dangling != 0),
        adjacent_crossings=int(b.adjacent_crossings != 0),
        adjacent_turns=int(b.adjacent_turns != 0),
    )


class EliteArchive:
    """At most one individual per niche; a niche only accepts strictly lower fitness."""

    def __init__(self):
        self._elites: dict[NicheIndex, Individual] = {}
        self.history: list[tuple[int, NicheIndex, float]] = []

    def __len__(self):
        return len(self._elites)

    def __contains__(self, niche):
        return niche in self._elites

    def __getitem__(self, niche) -> Individual:
        return self._elites[niche]

    def items(self):
        return self._elites.items()

    def values(self):
        return self._elites.values()

    def insert(self, ind: Individual, generation: int = 0) -> bool:
        niche = quantize(ind.descriptor)
        incumbent = self._elites.get(niche)
        if incumbent is not None and not ind.fitness < incumbent.fitness:
            return False
        self._elites[niche] = ind
        self.history.append((generation, niche, ind.fitness))
        return True

    def best(self) -> Individual:
        if not self._elites:
            raise ValueError("archive is empty")
        return min(self._elites.values(), key=lambda ind: ind.fitness)

    def to_records(self) -> list[dict]:
        return [{"niche": list(niche), "descriptor": list(ind.descriptor),
                 "fitness": ind.fitness, "grid": to_dict(ind.grid)}
                for niche, ind in sorted(self._elites.items())]


def random_grid(shape, rng, *, allow_empty: bool = False) -> np.ndarray:
    low = 0 if allow_empty else 1
    return rng.integers(low, N_CODES, size=tuple(shape)).astype(np.int64)


def tile_change(grid: np.ndarray, rate: float, rng) -> np.ndarray:
    """Give ``round(rate * cells)`` distinct cells (at least one) a new non-empty code."""
    g = grid.copy()
    n = max(1, int(round(rate * g.size)))
    for i in rng.choice(g.size, size=n, replace=False):
        cur = int(g.flat[i])
        choices = [c for c in range(1, N_CODES) if c != cur]
        g.flat[i] = choices[int(rng.integers(len(choices)))]
    return g


def crossing_insertion(grid: np.ndarray, rng) -> np.ndarray:
    g = grid.copy()
    i = int(rng.integers(g.size))
    g.flat[i] = CROSSING_CODES[int(rng.integers(len(CROSSING_CODES)))]
    return g


def mutate(parent: Individual, cfg: EvoConfig, rng,
           weights: FitnessWeights = DEFAULT_WEIGHTS) -> Individual:
    g = parent.grid
    if rng.random() < cfg.p_tile_change:
        g = tile_change(g, cfg.mutation_rate, rng)
    if rng.random() < cfg.p_crossing_insert:
        g = crossing_insertion(g, rng)
    g = repair_full(g, keep_nonempty=cfg.full_coverage).grid
    return Individual.from_grid(g, weights)


def tournament_select(pop: list[Individual], k: int, rng) -> Individual:
    if not pop:
        raise ValueError("population is empty")
    if k < 1:
        raise ValueError("tournament size must be >= 1")
    winner = None
    for i in rng.integers(len(pop), size=k):
        cand = pop[int(i)]
        if winner is None or cand.fitness < winner.fitness:
            winner = cand
    return winner


@dataclass
class EvoResult:
    population: list[Individual]
    archive: EliteArchive
    best: Individual
    trace: list[float] = field(default_factory=list)


def evolve(shape, cfg: EvoConfig | None = None,
           weights: FitnessWeights = DEFAULT_WEIGHTS) -> EvoResult:
    cfg = cfg or EvoConfig()
    rng = np.random.default_rng(cfg.seed)
    pop = []
    for _ in range(cfg.mu):
        g = random_grid(shape, rng)
        pop.append(Individual.from_grid(repair_full(g, keep_nonempty=cfg.full_coverage).grid,
                                        weights))
    pop.sort(key=lambda ind: ind.fitness)
    archive = EliteArchive()
    best = pop[0]
    trace = []
    for gen in range(1, cfg.generations + 1):
        offspring = []
        for _ in range(cfg.lambda_):
            child = mutate(tournament_select(pop, cfg.tournament_size, rng), cfg, rng, weights)
            if cfg.map_elites:
                archive.insert(child, gen)
            offspring.append(child)
        # stable sort: on equal fitness the parents (older) stay ahead
        pop = sorted(pop + offspring, key=lambda ind: ind.fitness)[:cfg.mu]
        if pop[0].fitness < best.fitness:
            best = pop[0]
        trace.append(best.fitness)
    return EvoResult(pop, archive, best, trace)


@dataclass
class DescriptorSpread:
    count: int
    minimum: dict
    maximum: dict
    iqr: dict

    def to_dict(self) -> dict:
        return {"count": self.count, "min": self.minimum, "max": self.maximum, "iqr": self.iqr}


def descriptor_spread(individuals: Iterable[Individual]) -> DescriptorSpread:
    """Min, max and inter-quartile range of each descriptor over a set of individuals."""
    rows = np.array([tuple(ind.descriptor) for ind in individuals], dtype=float)
    if rows.size == 0:
        raise ValueError("cannot summarise an empty set of individuals")
    names = BehaviorDescriptor._fields
    q1, q3 = np.percentile(rows, [25, 75], axis=0)
    return DescriptorSpread(
        count=len(rows),
        minimum={n: float(v) for n, v in zip(names, rows.min(axis=0))},
        maximum={n: float(v) for n, v in zip(names, rows.max(axis=0))},
        iqr={n: float(v) for n, v in zip(names, q3 - q1)},
    )


def archive_spread(archive: EliteArchive) -> DescriptorSpread:
    """Occupied niches plus per-descriptor range and IQR across the stored elites."""
    if len(archive) == 0:
        raise ValueError("archive is empty")
    return descriptor_spread(archive.values())
