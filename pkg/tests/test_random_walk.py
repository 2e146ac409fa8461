import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import StubRng
from hbrkga.errors import EvaluationError, UsageError
from hbrkga.objective import CountingObjective, FunctionObjective, synthetic_objective
from hbrkga.random_walk import WalkConfig, apply_move, movement, random_walk, step_width


def test_movement_forced_draws(mixed_space):
    gamma = np.array([70, 1.5, 30, 30, 0.0])
    # i = 0, Bernoulli draw 0 (random() >= 0.5) so sign = +1, magnitude 10
    out = movement(gamma, mixed_space, 0.15, StubRng(integers=[0], random=[0.9], uniform=[10.0]))
    assert out.tolist() == [80, 1.5, 30, 30, 0.0]
    assert gamma.tolist() == [70, 1.5, 30, 30, 0.0]


def test_movement_negative_sign(mixed_space):
    gamma = np.array([70, 1.5, 30, 30, 0.0])
    out = movement(gamma, mixed_space, 0.15, StubRng(integers=[1], random=[0.1], uniform=[0.5]))
    assert out.tolist() == [70, 1.0, 30, 30, 0.0]


def test_movement_clamps_at_max(mixed_space):
    gamma = np.array([100, 1.5, 30, 30, 0.0])
    out = movement(gamma, mixed_space, 0.15, StubRng(integers=[0], random=[0.7], uniform=[37.0]))
    assert out[0] == 100


def test_step_width_floor():
    assert step_width(0.0, 10.24, 0.15) == pytest.approx(0.1024)
    assert step_width(-2.0, 10.24, 0.15) == pytest.approx(2.3)


def test_apply_move_snaps(mixed_space):
    out = apply_move(np.array([70, 1.5, 30, 30, 0.0]), mixed_space, 2, 4.4)
    assert out[2] == 34


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_movement_changes_at_most_one_coordinate(seed):
    from hbrkga.hyperspace import DimensionSpec, HyperSpace

    space = HyperSpace([DimensionSpec("a", "int", 0, 100), DimensionSpec("b", "float", -1, 1),
                        DimensionSpec("c", "float", 0, 3)])
    rng = np.random.default_rng(seed)
    gamma = space.decode(rng.random(3))
    out = movement(gamma, space, 0.15, rng)
    assert np.sum(out != gamma) <= 1
    assert space.contains(out)


def test_walk_config_validation():
    with pytest.raises(UsageError):
        WalkConfig(-1, 0.1)
    with pytest.raises(UsageError):
        WalkConfig(1, -0.1)


def test_nmov_zero_returns_snapped_keys(mixed_space):
    obj = CountingObjective(synthetic_objective("sphere", 5))
    keys = np.array([0.703, 0.5, 0.61, 0.5, 0.25])
    res = random_walk(keys, WalkConfig(0, 0.15), obj, mixed_space, np.random.default_rng(0))
    assert obj.calls == 1
    assert res.keys.tolist() == pytest.approx(mixed_space.encode(mixed_space.decode(keys)).tolist())
    assert res.score == obj.inner(mixed_space.decode(keys))


@pytest.mark.parametrize("nmov", [1, 3, 7])
def test_evaluation_count(mixed_space, nmov):
    obj = CountingObjective(synthetic_objective("rastrigin", 5))
    res = random_walk(np.full(5, 0.3), WalkConfig(nmov, 0.15), obj, mixed_space, np.random.default_rng(1))
    assert obj.calls == 1 + nmov == len(res.evaluations)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_incumbent_is_min_over_chain(seed, nmov):
    from hbrkga.hyperspace import DimensionSpec, HyperSpace

    space = HyperSpace([DimensionSpec(f"x{i}", "int" if i % 2 else "float", -5, 5) for i in range(4)])
    obj = synthetic_objective("rastrigin", 4)
    rng = np.random.default_rng(seed)
    res = random_walk(rng.random(4), WalkConfig(nmov, 0.15), obj, space, rng)
    scores = [e.score for e in res.evaluations]
    assert res.score == min(scores)
    assert res.score <= scores[0]
    # returned keys decode back to the incumbent, and are a fixed point of encode∘decode
    assert space.contains(space.decode(res.keys))
    np.testing.assert_allclose(space.decode(res.keys), res.gamma, atol=1e-12 * 10)
    np.testing.assert_allclose(space.encode(space.decode(res.keys)), res.keys, atol=1e-15)


def test_chain_continues_from_latest_step(rastrigin_space):
    # a flat objective never accepts, yet successive candidates still differ in one coordinate each
    obj = FunctionObjective(lambda g: 1.0, 5, "flat")
    res = random_walk(np.full(5, 0.8), WalkConfig(50, 0.15), obj, rastrigin_space, np.random.default_rng(5))
    chain = [np.array(e.gamma) for e in res.evaluations]
    assert all(np.sum(a != b) <= 1 for a, b in zip(chain, chain[1:]))
    assert res.gamma.tolist() == chain[0].tolist()
    # with no acceptances the chain still wanders away from the start
    assert np.any(chain[-1] != chain[0])


def test_walk_propagates_failures_with_context(mixed_space):
    calls = []

    def flaky(g):
        calls.append(1)
        if len(calls) == 3:
            raise RuntimeError("diverged")
        return 0.0

    with pytest.raises(EvaluationError) as err:
        random_walk(np.full(5, 0.5), WalkConfig(3, 0.15), FunctionObjective(flaky, 5, "flaky"), mixed_space,
                    np.random.default_rng(0), strategy="hbrkga", first_trial=10)
    assert err.value.trial_index == 12
    assert err.value.strategy == "hbrkga"
