"""Particle swarm and grey wolf search over per-cell tile logits.

A position is a ``(height, width, 16)`` array of logits. It is decoded by
softmax and one categorical draw per cell, then repaired and scored with
the shared fitness. Both methods keep the best decoded grid ever seen.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fitness import DEFAULT_WEIGHTS, FitnessWeights, fitness
from .metrics import MetricReport, full_report
from .repair import repair_full
from .tiles import N_CODES

METHODS = ("pso", "gwo")


@dataclass
class SwarmConfig:
    population: int = 40
    generations: int = 200
    inertia: float = 0.7
    c1: float = 1.5
    c2: float = 1.5
    velocity_clamp: float = 8.0
    gwo_epsilon_amplitude: float = 0.1
    # "worst" uses the worst wolf as third leader; "delta" is canonical GWO's third-best
    gwo_third_leader: str = "worst"
    repair_after_decode: bool = True
    full_coverage: bool = True
    seed: Optional[int] = None

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.gwo_third_leader not in ("worst", "delta"):
            raise ValueError("gwo_third_leader must be 'worst' or 'delta'")
        if self.gwo_third_leader == "delta" and self.population < 3:
            raise ValueError("the 'delta' leader needs population >= 3")


def softmax_probs(v: np.ndarray) -> np.ndarray:
    """Softmax over the last axis, shifted by the per-cell max for stability."""
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("logits must be finite")
    e = np.exp(v - v.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def decode_sample(v: np.ndarray, rng: np.random.Generator, *,
                  exclude_empty: bool = True) -> np.ndarray:
    """Draw one tile code per cell from the softmax of ``v`` (any leading shape)."""
    p = softmax_probs(v)
    if exclude_empty:
        p[..., 0] = 0.0
        p /= p.sum(axis=-1, keepdims=True)
    cum = np.cumsum(p, axis=-1)
    u = rng.random(p.shape[:-1] + (1,))
    codes = np.count_nonzero(cum < u * cum[..., -1:], axis=-1)
    return np.minimum(codes, N_CODES - 1).astype(np.int64)


@dataclass
class Candidate:
    grid: np.ndarray
    fitness: float
    report: MetricReport


@dataclass
class SwarmState:
    x: np.ndarray
    fitness: np.ndarray
    rng: np.random.Generator
    v: Optional[np.ndarray] = None
    pbest_x: Optional[np.ndarray] = None
    pbest_f: Optional[np.ndarray] = None
    gbest_x: Optional[np.ndarray] = None
    gbest_f: float = np.inf
    best: Optional[Candidate] = None
    trace: list = field(default_factory=list)
    generation: int = 0


def _evaluate(x, rng, cfg: SwarmConfig, weights: FitnessWeights):
    grids = decode_sample(x, rng, exclude_empty=cfg.full_coverage)
    f = np.empty(len(x))
    cands = []
    for i, g in enumerate(grids):
        if cfg.repair_after_decode:
            g = repair_full(g, keep_nonempty=cfg.full_coverage).grid
        report = full_report(g)
        f[i] = fitness(report, weights)
        cands.append(Candidate(g, float(f[i]), report))
    return f, cands


def _keep_best(state: SwarmState, f, cands):
    i = int(np.argmin(f))
    if state.best is None or f[i] < state.best.fitness:
        state.best = cands[i]


def _init_positions(shape, cfg):
    rng = np.random.default_rng(cfg.seed)
    x = rng.uniform(-1.0, 1.0, (cfg.population,) + tuple(shape) + (N_CODES,))
    return rng, x


def init_pso(shape, cfg: SwarmConfig, weights: FitnessWeights = DEFAULT_WEIGHTS) -> SwarmState:
    rng, x = _init_positions(shape, cfg)
    v = rng.uniform(-1.0, 1.0, x.shape)
    f, cands = _evaluate(x, rng, cfg, weights)
    g = int(np.argmin(f))
    state = SwarmState(x=x, v=v, fitness=f, rng=rng, pbest_x=x.copy(), pbest_f=f.copy(),
                       gbest_x=x[g].copy(), gbest_f=float(f[g]))
    _keep_best(state, f, cands)
    return state


def pso_step(state: SwarmState, cfg: SwarmConfig,
             weights: FitnessWeights = DEFAULT_WEIGHTS) -> SwarmState:
    rng = state.rng
    x = state.x
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    v = (cfg.inertia * state.v
         + cfg.c1 * r1 * (state.pbest_x - x)
         + cfg.c2 * r2 * (state.gbest_x[None] - x))
    np.clip(v, -cfg.velocity_clamp, cfg.velocity_clamp, out=v)
    state.v = v
    state.x = x + v
    f, cands = _evaluate(state.x, rng, cfg, weights)
    state.fitness = f
    improved = f < state.pbest_f
    state.pbest_x[improved] = state.x[improved]
    state.pbest_f[improved] = f[improved]
    g = int(np.argmin(f))
    if f[g] < state.gbest_f:
        state.gbest_f = float(f[g])
        state.gbest_x = state.x[g].copy()
    _keep_best(state, f, cands)
    state.generation += 1
    state.trace.append(state.best.fitness)
    return state


def init_gwo(shape, cfg: SwarmConfig, weights: FitnessWeights = DEFAULT_WEIGHTS) -> SwarmState:
    rng, x = _init_positions(shape, cfg)
    f, cands = _evaluate(x, rng, cfg, weights)
    state = SwarmState(x=x, fitness=f, rng=rng)
    _keep_best(state, f, cands)
    return state


def gwo_leaders(x: np.ndarray, f: np.ndarray, third: str = "worst"):
    order = np.argsort(f, kind="stable")
    return x[order[0]], x[order[1]], x[order[-1] if third == "worst" else order[2]]


def gwo_step(state: SwarmState, cfg: SwarmConfig,
             weights: FitnessWeights = DEFAULT_WEIGHTS) -> SwarmState:
    rng = state.rng
    alpha, beta, third = gwo_leaders(state.x, state.fitness, cfg.gwo_third_leader)
    centre = (alpha + beta + third) / 3.0
    a = cfg.gwo_epsilon_amplitude
    eps = rng.uniform(-a, a, state.x.shape) if a > 0 else 0.0
    state.x = centre[None] + eps
    f, cands = _evaluate(state.x, rng, cfg, weights)
    state.fitness = f
    _keep_best(state, f, cands)
    state.generation += 1
    state.trace.append(state.best.fitness)
    return state


@dataclass
class SwarmResult:
    grid: np.ndarray
    fitness: float
    report: MetricReport
    trace: list


def run_swarm(method: str, shape, cfg: SwarmConfig | None = None,
              weights: FitnessWeights = DEFAULT_WEIGHTS) -> SwarmResult:
    """Run ``cfg.generations`` PSO or GWO steps and return the best grid found."""
    cfg = cfg or SwarmConfig()
    method = method.lower()
    if method not in METHODS:
        raise ValueError(f"unknown swarm method {method!r}; expected one of {METHODS}")
    init, step = (init_pso, pso_step) if method == "pso" else (init_gwo, gwo_step)
    state = init(shape, cfg, weights)
    for _ in range(cfg.generations):
        step(state, cfg, weights)
    best = state.best
    return SwarmResult(best.grid, best.fitness, best.report, list(state.trace))
