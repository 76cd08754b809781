import numpy as np
import pytest
from scipy.stats import chisquare

from roadgen.grid import mismatch_count
from roadgen.metrics import full_report
from roadgen.swarm import (
    SwarmConfig, SwarmState, decode_sample, gwo_leaders, gwo_step, init_gwo, init_pso,
    pso_step, run_swarm, softmax_probs,
)


def test_softmax_uniform_and_shift_invariant(rng):
    assert np.allclose(softmax_probs(np.zeros((2, 2, 16))), 1 / 16)
    v = rng.normal(size=(3, 4, 16))
    shift = rng.normal(size=(3, 4, 1)) * 100
    assert np.allclose(softmax_probs(v), softmax_probs(v + shift), atol=1e-12)


def test_softmax_dominant_logit():
    v = np.zeros(16)
    v[7] = 50
    assert softmax_probs(v)[7] >= 1 - 1e-9


def test_softmax_rows_sum_to_one(rng):
    p = softmax_probs(rng.uniform(-700, 700, size=(50, 12, 16)))
    assert np.all(np.abs(p.sum(axis=-1) - 1) <= 1e-9)


def test_softmax_rejects_non_finite():
    with pytest.raises(ValueError):
        softmax_probs(np.full(16, np.nan))


def test_decode_dominant_logits_gives_argmax(rng):
    target = rng.integers(1, 16, size=(5, 5))
    v = np.zeros((5, 5, 16))
    np.put_along_axis(v, target[..., None], 50.0, axis=-1)
    assert np.array_equal(decode_sample(v, rng), target)


def test_decode_uniform_frequencies(rng):
    draws = decode_sample(np.zeros((10_000, 16)), rng, exclude_empty=False)
    counts = np.bincount(draws, minlength=16)
    assert chisquare(counts).pvalue > 0.001


def test_decode_full_coverage_never_draws_empty(rng):
    v = np.zeros((200, 16))
    v[:, 0] = 5.0  # heavily favour the empty code
    assert np.all(decode_sample(v, rng, exclude_empty=True) > 0)


def test_pso_zero_coefficients_freeze_positions():
    cfg = SwarmConfig(population=4, generations=1, inertia=0, c1=0, c2=0, seed=3)
    state = init_pso((3, 3), cfg)
    x0 = state.x.copy()
    pso_step(state, cfg)
    assert np.all(state.v == 0)
    assert np.array_equal(state.x, x0)


def test_pso_attraction_vanishes_at_bests(rng):
    cfg = SwarmConfig(population=2, generations=1, inertia=0.5, velocity_clamp=100.0)
    x = np.ones((2, 2, 2, 16))
    v = rng.normal(size=x.shape)
    state = SwarmState(x=x.copy(), v=v.copy(), fitness=np.full(2, np.inf), rng=rng,
                       pbest_x=x.copy(), pbest_f=np.full(2, np.inf), gbest_x=x[0].copy())
    pso_step(state, cfg)
    assert np.allclose(state.v, 0.5 * v)


def test_gwo_fixed_point_without_noise(rng):
    cfg = SwarmConfig(population=3, generations=1, gwo_epsilon_amplitude=0.0)
    x = np.repeat(rng.normal(size=(1, 2, 2, 16)), 3, axis=0)
    state = SwarmState(x=x.copy(), fitness=np.array([1.0, 2.0, 3.0]), rng=rng)
    gwo_step(state, cfg)
    assert np.allclose(state.x, x)


def test_gwo_zero_amplitude_collapses_pack():
    cfg = SwarmConfig(population=6, generations=1, gwo_epsilon_amplitude=0.0, seed=1)
    state = gwo_step(init_gwo((3, 3), cfg), cfg)
    assert all(np.array_equal(state.x[0], w) for w in state.x)


def test_gwo_leader_choice():
    x = np.arange(4)[:, None] * np.ones((4, 16))
    f = np.array([3.0, 1.0, 4.0, 2.0])
    a, b, worst = gwo_leaders(x, f, "worst")
    assert (a[0], b[0], worst[0]) == (1, 3, 2)
    assert gwo_leaders(x, f, "delta")[2][0] == 0


@pytest.mark.parametrize("method", ["pso", "gwo"])
def test_run_swarm_contract(method):
    cfg = SwarmConfig(population=8, generations=15, seed=11)
    res = run_swarm(method, (6, 6), cfg)
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    assert len(res.trace) == 15
    assert res.trace[-1] == res.fitness
    assert mismatch_count(res.grid) == 0
    r = full_report(res.grid)
    assert r.boundary_violations == 0 and r.coverage == 1.0
    again = run_swarm(method, (6, 6), cfg)
    assert again.trace == res.trace and np.array_equal(again.grid, res.grid)


def test_config_validation():
    with pytest.raises(ValueError):
        SwarmConfig(population=1)
    with pytest.raises(ValueError):
        SwarmConfig(gwo_third_leader="omega")
    with pytest.raises(ValueError):
        run_swarm("abc", (3, 3))
