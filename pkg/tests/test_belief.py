import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.exceptions import BeliefError, PerceptCompatibilityError, ZeroProbabilityObservationError
from src.geometry import Fcp, Polytope, bounding_box, product_fcp
from src.models.belief import (
    ParticleBelief,
    RegionBelief,
    branches,
    check_compatible,
    expect_pwc,
    mixture,
    obs_prob,
    particle_update,
    region_update,
    support_mass
)
from src.models.nspomdp import AgentState, EnvPwc
from tests.conftest import mixture_model, random_model, random_particles, zero_model

START = AgentState(1, 1)


def test_particle_creation_merges_and_normalises():
    b = ParticleBelief.create(START, [[0.5, 0.5], [0.5, 0.5], [1.0, 1.0]], [1.0, 1.0, 2.0])
    assert b.size == 2
    assert b.weights.sum() == pytest.approx(1.0)
    assert b.mass_at([0.5, 0.5]) == pytest.approx(0.5)
    assert b.mass_at([3.0, 3.0]) == 0.0
    with pytest.raises(BeliefError):
        ParticleBelief.create(START, [[0.5, 0.5]], [0.0])
    with pytest.raises(BeliefError):
        ParticleBelief.create(START, [[0.5, 0.5]], [0.5, 0.5])


def test_region_creation_normalises_mass():
    b = RegionBelief.create(START, [Polytope.box([0, 0], [1, 1]), Polytope.box([1, 0], [2, 2])], [1.0, 1.0])
    assert b.masses().sum() == pytest.approx(1.0)
    assert b.densities == pytest.approx([1 / 3, 1 / 3])
    with pytest.raises(BeliefError):
        RegionBelief.create(START, [Polytope.box([0, 0], [1, 0])])
    with pytest.raises(BeliefError):
        RegionBelief.create(START, [])


def test_keys_ignore_particle_order():
    a = ParticleBelief.create(START, [[0.5, 0.5], [1.0, 1.0]], [0.25, 0.75])
    b = ParticleBelief.create(START, [[1.0, 1.0], [0.5, 0.5]], [0.75, 0.25])
    assert a.key == b.key
    c = ParticleBelief.create(START, [[1.0, 1.0], [0.5, 0.5]], [0.5, 0.5])
    assert a.key != c.key


def test_compliant_step_is_deterministic(carpark4):
    b = ParticleBelief.create(START, [[0.5, 0.5]])
    outs = branches(carpark4, b, 'up')
    assert len(outs) == 1
    assert outs[0].agent_state == AgentState(2, 5)
    assert outs[0].probability == pytest.approx(1.0)
    assert obs_prob(carpark4, b, 'up', (2, 5)) == pytest.approx(1.0)
    assert obs_prob(carpark4, b, 'up', (1, 5)) == 0.0
    updated = particle_update(carpark4, b, 'up', (2, 5))
    assert updated.points == pytest.approx(np.array([[0.5, 1.5]]))
    with pytest.raises(ZeroProbabilityObservationError):
        particle_update(carpark4, b, 'up', (1, 5))


def test_percept_filter_renormalises(carpark4):
    b = ParticleBelief.create(START, [[0.5, 0.5], [0.25, 0.75]], [0.5, 0.5])
    # both particles go up into cell 5; trust moves to 2
    after = particle_update(carpark4, b, 'up', (2, 5))
    assert after.size == 2
    assert after.weights.sum() == pytest.approx(1.0)
    model = mixture_model()
    pair = ParticleBelief.create(START, [[0.5, 0.5], [1.5, 1.5]])
    assert obs_prob(model, pair, 'go', (1, 2)) == pytest.approx(0.25)
    kept = particle_update(model, pair, 'go', (1, 2))
    assert kept.size == 1
    assert kept.points == pytest.approx(np.array([[2.5, 1.5]]))
    assert kept.weights == pytest.approx([1.0])


def test_mixture_dynamics_split_particles():
    model = mixture_model()
    b = ParticleBelief.create(START, [[0.5, 0.5]])
    outs = {br.agent_state: br for br in branches(model, b, 'go')}
    assert set(outs) == {AgentState(1, 1)}
    assert outs[AgentState(1, 1)].belief.size == 2
    assert outs[AgentState(1, 1)].belief.weights == pytest.approx([0.5, 0.5])

    near = ParticleBelief.create(START, [[1.5, 1.5]])
    outs = {br.agent_state: br.probability for br in branches(model, near, 'go')}
    assert outs == pytest.approx({AgentState(1, 2): 0.5, AgentState(1, 3): 0.5})


def test_region_update_translation(carpark4):
    b = RegionBelief.create(START, [Polytope.box([0, 0], [1, 1])])
    after = region_update(carpark4, b, 'up', (2, 5))
    assert after.size == 1
    assert after.densities == pytest.approx([1.0])
    assert after.masses().sum() == pytest.approx(1.0)


def test_region_straddling_two_cells():
    model = mixture_model()
    b = RegionBelief.create(START, [Polytope.box([0.5, 0.0], [1.5, 1.0])])
    outs = {br.agent_state: br for br in branches(model, b, 'go')}
    # right: [1.5, 2.5] x [0, 1] splits evenly; up: [0.5, 1.5] x [1, 2] stays in quadrant 1
    assert outs[AgentState(1, 1)].probability == pytest.approx(0.75)
    assert outs[AgentState(1, 2)].probability == pytest.approx(0.25)
    fragment = outs[AgentState(1, 2)].belief
    assert fragment.densities == pytest.approx([1 / 0.5])


def test_identity_dynamics_keep_region_belief():
    model = zero_model()
    b = RegionBelief.create(START, [Polytope.box([1, 1], [3, 2])], [3.0])
    after = region_update(model, b, 'stay', START)
    assert after.masses().sum() == pytest.approx(1.0)
    assert after.densities == pytest.approx(b.densities)


def test_update_requires_the_right_kind(carpark4):
    with pytest.raises(BeliefError):
        region_update(carpark4, ParticleBelief.create(START, [[0.5, 0.5]]), 'up', (2, 5))
    with pytest.raises(BeliefError):
        particle_update(carpark4, RegionBelief.create(START, [Polytope.box([0, 0], [1, 1])]), 'up', (2, 5))


def test_expectations(carpark4):
    reward = carpark4.reward_function('up')
    assert expect_pwc(EnvPwc(Fcp.single(carpark4.domain, 7.0)), ParticleBelief.create(START, [[0.5, 0.5]])) == 7.0
    spot = AgentState(1, 15)
    assert expect_pwc(reward, ParticleBelief.create(spot, [[2.5, 3.5]])) == pytest.approx(1000.0)
    assert expect_pwc(reward, RegionBelief.create(spot, [Polytope.box([2, 3], [3, 4])])) == pytest.approx(1000.0)


def test_expectation_is_linear():
    model = random_model(2)
    f = model.reward_state
    g = model.reward_action[model.actions[0]]
    both = product_fcp(f, g, lambda a, c: 2.0 * a - 3.0 * c)
    for seed in range(5):
        b = random_particles(model, seed, count=3)
        lhs = expect_pwc(EnvPwc(both), b)
        rhs = 2.0 * expect_pwc(EnvPwc(f), b) - 3.0 * expect_pwc(EnvPwc(g), b)
        assert lhs == pytest.approx(rhs, abs=1e-9)
    region = RegionBelief.create(START, [Polytope.box([0.5, 0.5], [1.5, 1.5])])
    lhs = expect_pwc(EnvPwc(both), region)
    rhs = 2.0 * expect_pwc(EnvPwc(f), region) - 3.0 * expect_pwc(EnvPwc(g), region)
    assert lhs == pytest.approx(rhs, abs=1e-9)


@pytest.mark.parametrize('seed', range(5))
def test_observation_probabilities_sum_to_one_and_stay_compatible(seed):
    model = random_model(seed, n_components=2)
    rng = np.random.default_rng(seed)
    b = random_particles(model, seed, count=3)
    for _ in range(5):
        action = model.actions[int(rng.integers(len(model.actions)))]
        outs = branches(model, b, action)
        assert sum(br.probability for br in outs) == pytest.approx(1.0, abs=1e-9)
        for br in outs:
            check_compatible(model, br.belief)
            assert br.belief.weights.sum() == pytest.approx(1.0, abs=1e-12)
        b = outs[int(rng.integers(len(outs)))].belief


def test_bayes_consistency_for_particles():
    model = random_model(11, n_components=2)
    b = random_particles(model, 11, count=3)
    action = model.actions[0]
    joint = {}
    for x, w in zip(b.points, b.weights):
        for (state, x_next), p in model.successors((b.agent_state, x), action):
            key = (state, tuple(np.round(x_next, 9)))
            joint[key] = joint.get(key, 0.0) + w * p
    for br in branches(model, b, action):
        for x_next, w_next in zip(br.belief.points, br.belief.weights):
            key = (br.agent_state, tuple(np.round(x_next, 9)))
            assert br.probability * w_next == pytest.approx(joint[key], abs=1e-9)


def test_region_compatibility_check(carpark4):
    check_compatible(carpark4, RegionBelief.create(START, [Polytope.box([0, 0], [1, 1])]))
    with pytest.raises(PerceptCompatibilityError):
        check_compatible(carpark4, RegionBelief.create(START, [Polytope.box([0, 0], [1.5, 1])]))
    with pytest.raises(PerceptCompatibilityError):
        check_compatible(carpark4, ParticleBelief.create(START, [[1.5, 0.5]]))


def test_support_mass_and_mixture():
    b = ParticleBelief.create(START, [[0.5, 0.5], [1.5, 0.5]], [0.25, 0.75])
    assert support_mass(b, Polytope.box([0, 0], [1, 1])) == pytest.approx(0.25)
    region = RegionBelief.create(START, [Polytope.box([0, 0], [2, 1])])
    assert support_mass(region, Polytope.box([0, 0], [1, 1])) == pytest.approx(0.5)
    other = ParticleBelief.create(START, [[0.5, 0.5]])
    mixed = mixture(b, other, 0.5)
    assert mixed.mass_at([0.5, 0.5]) == pytest.approx(0.625)
    with pytest.raises(BeliefError):
        mixture(b, ParticleBelief.create(AgentState(2, 1), [[0.5, 0.5]]), 0.5)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_region_update_chains_conserve_mass(seed):
    model = random_model(seed % 50, n_components=2)
    rng = np.random.default_rng(seed)
    state = model.agent_states()[int(rng.integers(len(model.agent_states())))]
    cells = model.percept_regions(state)
    lo, hi = bounding_box(cells[0])
    corner = lo + rng.uniform(0.05, 0.4, size=2) * (hi - lo)
    b = RegionBelief.create(state, [Polytope.box(corner, corner + rng.uniform(0.2, 0.5, size=2) * (hi - lo))])
    for _ in range(3):
        action = model.actions[int(rng.integers(len(model.actions)))]
        outs = branches(model, b, action)
        assert sum(br.probability for br in outs) == pytest.approx(1.0, abs=1e-9)
        for br in outs:
            assert br.belief.masses().sum() == pytest.approx(1.0, abs=1e-9)
            check_compatible(model, br.belief)
        b = outs[int(rng.integers(len(outs)))].belief
