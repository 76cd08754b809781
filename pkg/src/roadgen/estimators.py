"""scikit-learn style front-ends for the generators and the metric extractor.

Generators take all settings in ``__init__`` (so ``get_params``/``clone``
work), run their search in ``fit`` and expose results as trailing-underscore
attributes::

    gen = MAPElitesGenerator(height=12, width=12, random_state=0).fit()
    gen.best_grid_, gen.best_fitness_, gen.archive_
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .evo import EvoConfig, evolve
from .fitness import DEFAULT_WEIGHTS, FitnessWeights, fitness
from .grid import check_grid
from .metrics import MetricReport, full_report
from .swarm import SwarmConfig, run_swarm
from .wfc import WfcConfig, wfc_run


def _weights(w) -> FitnessWeights:
    if w is None:
        return DEFAULT_WEIGHTS
    if isinstance(w, FitnessWeights):
        return w
    return FitnessWeights.from_dict(dict(w))


def _seed(random_state):
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return None if random_state is None else int(random_state)
    raise ValueError(f"random_state must be None or an int, got {random_state!r}")


class _GridGenerator(BaseEstimator):
    def _check_size(self):
        for name in ("height", "width"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        return int(self.height), int(self.width)

    def _finish(self, grid, trace):
        self.best_grid_ = grid
        self.report_ = full_report(grid)
        self.best_fitness_ = fitness(self.report_, _weights(self.weights))
        self.fitness_trace_ = list(trace)
        return self

    def generate(self) -> np.ndarray:
        """Fit and return the best grid."""
        return self.fit().best_grid_


class WFCGenerator(_GridGenerator):
    def __init__(self, height=12, width=12, max_attempts=10, forbid_adjacent_crossings=True,
                 hard_boundary=False, allow_empty=False, weights=None, random_state=None):
        self.height = height
        self.width = width
        self.max_attempts = max_attempts
        self.forbid_adjacent_crossings = forbid_adjacent_crossings
        self.hard_boundary = hard_boundary
        self.allow_empty = allow_empty
        self.weights = weights
        self.random_state = random_state

    def fit(self, X=None, y=None):
        h, w = self._check_size()
        cfg = WfcConfig(max_attempts=self.max_attempts,
                        forbid_adjacent_crossings=self.forbid_adjacent_crossings,
                        hard_boundary=self.hard_boundary, allow_empty=self.allow_empty,
                        seed=_seed(self.random_state))
        grid, self.attempts_ = wfc_run(h, w, cfg)
        self._finish(grid, [])
        self.fitness_trace_ = [self.best_fitness_]
        return self


class _SwarmGenerator(_GridGenerator):
    _method = ""

    def _config(self) -> SwarmConfig:
        raise NotImplementedError

    def fit(self, X=None, y=None):
        shape = self._check_size()
        res = run_swarm(self._method, shape, self._config(), _weights(self.weights))
        return self._finish(res.grid, res.trace)


class PSOGenerator(_SwarmGenerator):
    _method = "pso"

    def __init__(self, height=12, width=12, population=40, generations=200, inertia=0.7,
                 c1=1.5, c2=1.5, velocity_clamp=8.0, repair_after_decode=True,
                 full_coverage=True, weights=None, random_state=None):
        self.height = height
        self.width = width
        self.population = population
        self.generations = generations
        self.inertia = inertia
        self.c1 = c1
        self.c2 = c2
        self.velocity_clamp = velocity_clamp
        self.repair_after_decode = repair_after_decode
        self.full_coverage = full_coverage
        self.weights = weights
        self.random_state = random_state

    def _config(self):
        return SwarmConfig(population=self.population, generations=self.generations,
                           inertia=self.inertia, c1=self.c1, c2=self.c2,
                           velocity_clamp=self.velocity_clamp,
                           repair_after_decode=self.repair_after_decode,
                           full_coverage=self.full_coverage, seed=_seed(self.random_state))


class GWOGenerator(_SwarmGenerator):
    _method = "gwo"

    def __init__(self, height=12, width=12, population=40, generations=200,
                 epsilon_amplitude=0.1, third_leader="worst", repair_after_decode=True,
                 full_coverage=True, weights=None, random_state=None):
        self.height = height
        self.width = width
        self.population = population
        self.generations = generations
        self.epsilon_amplitude = epsilon_amplitude
        self.third_leader = third_leader
        self.repair_after_decode = repair_after_decode
        self.full_coverage = full_coverage
        self.weights = weights
        self.random_state = random_state

    def _config(self):
        return SwarmConfig(population=self.population, generations=self.generations,
                           gwo_epsilon_amplitude=self.epsilon_amplitude,
                           gwo_third_leader=self.third_leader,
                           repair_after_decode=self.repair_after_decode,
                           full_coverage=self.full_coverage, seed=_seed(self.random_state))


class EAGenerator(_GridGenerator):
    _map_elites = False

    def __init__(self, height=12, width=12, mu=40, lambda_=40, generations=200,
                 tournament_size=3, p_tile_change=0.7, p_crossing_insert=0.5,
                 mutation_rate=0.3, full_coverage=True, weights=None, random_state=None):
        self.height = height
        self.width = width
        self.mu = mu
        self.lambda_ = lambda_
        self.generations = generations
        self.tournament_size = tournament_size
        self.p_tile_change = p_tile_change
        self.p_crossing_insert = p_crossing_insert
        self.mutation_rate = mutation_rate
        self.full_coverage = full_coverage
        self.weights = weights
        self.random_state = random_state

    def fit(self, X=None, y=None):
        shape = self._check_size()
        cfg = EvoConfig(mu=self.mu, lambda_=self.lambda_, generations=self.generations,
                        tournament_size=self.tournament_size, p_tile_change=self.p_tile_change,
                        p_crossing_insert=self.p_crossing_insert,
                        mutation_rate=self.mutation_rate, map_elites=self._map_elites,
                        full_coverage=self.full_coverage, seed=_seed(self.random_state))
        res = evolve(shape, cfg, _weights(self.weights))
        self.population_ = res.population
        self.archive_ = res.archive
        self.best_individual_ = res.best
        return self._finish(res.best.grid, res.trace)


class MAPElitesGenerator(EAGenerator):
    """:class:`EAGenerator` that also fills a behaviour-niche archive (``archive_``)."""

    _map_elites = True


GENERATORS = {
    "wfc": WFCGenerator,
    "pso": PSOGenerator,
    "gwo": GWOGenerator,
    "ea": EAGenerator,
    "map-elites": MAPElitesGenerator,
}


def make_generator(method: str, **params) -> _GridGenerator:
    try:
        cls = GENERATORS[method.lower()]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(GENERATORS)}") from None
    return cls(**params)


class MetricsTransformer(TransformerMixin, BaseEstimator):
    """Map a sequence of grids to a ``(n_grids, n_metrics)`` float array.

    With ``include_fitness`` a last column holds the weighted fitness.
    """

    def __init__(self, include_fitness=False, weights=None):
        self.include_fitness = include_fitness
        self.weights = weights

    def fit(self, X, y=None):
        for g in X:
            check_grid(g)
        self.feature_names_ = MetricReport.field_names() + (["fitness"] if self.include_fitness else [])
        self.n_features_out_ = len(self.feature_names_)
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_names_")
        w = _weights(self.weights)
        rows = []
        for g in X:
            report = full_report(check_grid(g))
            row = [float(v) for v in report.to_dict().values()]
            if self.include_fitness:
                row.append(fitness(report, w))
            rows.append(row)
        return np.array(rows, dtype=float).reshape(len(rows), self.n_features_out_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_")
        return np.array(self.feature_names_, dtype=object)
