import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.exceptions import BudgetExceededError
from src.geometry import Polytope, bounding_box
from src.models.belief import ParticleBelief, RegionBelief, expect_pwc, mixture
from src.models.nspomdp import AgentState
from src.services.alpha import AlphaFunction, LowerBound, lb_value
from src.services.backup import (
    backup_at,
    bellman_lb,
    bellman_ub,
    bval,
    exact_vi_step,
    init_bounds,
    ispp_backup,
    point_update
)
from src.services.upper import UpperBoundSet, max_density_region, ub_value
from tests.conftest import SQUARE, mixture_model, random_model, random_particles, zero_model

START = AgentState(1, 1)
SPOT = AgentState(1, 15)


def _unit_grid_alpha(state, rng, low, high):
    cells = [(Polytope.box([i, j], [i + 1, j + 1]), float(rng.uniform(low, high)))
             for i in range(4) for j in range(4)]
    return AlphaFunction({state: cells}, low, SQUARE)


def _interior_samples(poly, rng, count=10, attempts=4000):
    lo, hi = bounding_box(poly)
    out = []
    for _ in range(attempts):
        x = rng.uniform(lo, hi)
        if np.all(poly.A @ x < poly.b - 1e-7):
            out.append(x)
            if len(out) == count:
                break
    return out


def test_alpha_function_lookup():
    alpha = AlphaFunction({START: [(Polytope.box([0, 0], [1, 1]), 5.0)]}, -1.0, SQUARE)
    assert alpha.value(START, [0.5, 0.5]) == 5.0
    assert alpha.value(START, [2.5, 0.5]) == -1.0
    assert alpha.value((2, 1), [0.5, 0.5]) == -1.0
    assert alpha.pieces((2, 1)) == [(SQUARE, -1.0)]
    assert sorted(alpha.clamp(0.0, 3.0).values()) == [0.0, 3.0]
    assert AlphaFunction.constant(SQUARE, 1.0).uid != alpha.uid


def test_initial_bounds(carpark4):
    b = ParticleBelief.create(START, [[0.5, 0.5]])
    lower, upper = init_bounds(carpark4, [b])
    assert lb_value(lower, b) == (0.0, 0)
    assert upper.value(b) == pytest.approx(5000.0)
    assert len(upper) == 1


def test_initial_bounds_without_seeds(carpark4_obstacle):
    b = ParticleBelief.create(START, [[0.5, 0.5]])
    lower, upper = init_bounds(carpark4_obstacle, [])
    assert lb_value(lower, b)[0] == pytest.approx(-5000.0)
    assert upper.value(b) == pytest.approx(5000.0)


def test_zero_model_bounds():
    model = zero_model()
    b = ParticleBelief.create(START, [[1.0, 1.0]])
    lower, upper = init_bounds(model, [b])
    assert lower.value(b)[0] == 0.0
    assert upper.value(b) == 0.0


def test_lower_bound_takes_the_largest_expectation():
    spot_cell = Polytope.box([2, 3], [3, 4])
    lower = LowerBound([
        AlphaFunction.constant(SQUARE, 0.0),
        AlphaFunction({SPOT: [(spot_cell, 1.0)]}, -1.0, SQUARE),
    ])
    assert lower.value(ParticleBelief.create(SPOT, [[2.5, 3.5]])) == (1.0, 1)
    assert lower.value(ParticleBelief.create(START, [[0.5, 0.5]])) == (0.0, 0)
    lower.add(AlphaFunction.constant(SQUARE, 1.0))
    # ties keep the lowest index; the cached maximum picks up new alphas
    assert lower.value(ParticleBelief.create(SPOT, [[2.5, 3.5]])) == (1.0, 1)
    assert lower.value(ParticleBelief.create(START, [[0.5, 0.5]])) == (1.0, 2)


def test_bval(carpark4):
    s = (START, [0.5, 0.5])
    const = AlphaFunction.constant(SQUARE, 10.0)
    assert bval(carpark4, s, 'up', (2, 5), const) == pytest.approx(8.0)
    assert bval(carpark4, s, 'up', (1, 5), const) == 0.0
    model = mixture_model()
    # each move takes (1.5, 1.5) into a different quadrant
    far = (AgentState(1, 1), [1.5, 1.5])
    assert bval(model, far, 'go', (1, 2), const) == pytest.approx(0.5 * 0.5 * 10.0)
    assert bval(model, far, 'go', (1, 1), const) == 0.0


def test_region_backup_on_absorbing_zero_model():
    model = zero_model()
    zero = AlphaFunction.constant(SQUARE, 0.0)
    fcp = ispp_backup(model, SQUARE, START, 'stay', {START: zero}, zero)
    assert all(value == 0.0 for _, value in fcp)


def test_region_backup_on_the_grid(carpark4):
    zero = AlphaFunction.constant(SQUARE, 0.0)
    cell = carpark4.percept_regions(AgentState(1, 11))[0]
    fcp = ispp_backup(carpark4, cell, (1, 11), 'up', {}, zero)
    assert [value for _, value in fcp] == [0.0]
    spot = carpark4.percept_regions(SPOT)[0]
    fcp = ispp_backup(carpark4, spot, SPOT, 'park', {}, zero)
    assert [value for _, value in fcp] == [1000.0]


@pytest.mark.parametrize('seed', range(3))
def test_region_backup_is_constant_on_each_region(seed):
    model = random_model(seed, n_components=2)
    rng = np.random.default_rng(seed)
    bounds = model.global_bounds()
    choices = {state: _unit_grid_alpha(state, rng, bounds.L, bounds.U) for state in model.agent_states()}
    fallback = AlphaFunction.constant(SQUARE, bounds.L)
    checked = 0
    for state, region in model.perception_fcp().regions[:3]:
        for action in model.actions:
            fcp = ispp_backup(model, region, state, action, choices, fallback)
            for poly, value in fcp:
                for x in _interior_samples(poly, rng):
                    direct = backup_at(model, (state, x), action, choices, fallback)
                    assert min(max(direct, bounds.L), bounds.U) == pytest.approx(value, abs=1e-9)
                    checked += 1
    assert checked > 0


def test_point_update_at_the_spot(carpark4):
    b = ParticleBelief.create(SPOT, [[2.5, 3.5]])
    lower, upper = init_bounds(carpark4, [b])
    first = point_update(carpark4, lower, upper, b)
    assert first.added
    assert first.alpha_value == pytest.approx(1000.0)
    assert first.p_star == pytest.approx(5000.0)
    assert lower.value(b)[0] == pytest.approx(1000.0)
    second = point_update(carpark4, lower, upper, b)
    # bumping into the top wall keeps the car on the spot at trust 1
    assert second.action == 'up'
    assert second.alpha_value == pytest.approx(1800.0)
    assert lower.value(b)[0] == pytest.approx(1800.0)
    assert len(lower) == 3


def test_point_update_at_a_fixed_point():
    model = zero_model()
    b = ParticleBelief.create(START, [[1.0, 1.0]])
    lower, upper = init_bounds(model, [b])
    result = point_update(model, lower, upper, b)
    assert not result.added
    assert result.p_star == 0.0
    assert len(lower) == 1


@pytest.mark.parametrize('seed', range(3))
def test_point_update_contracts(seed):
    model = random_model(seed, n_components=2)
    b = random_particles(model, seed, count=2)
    lower, upper = init_bounds(model, [b])
    previous = lower.value(b)[0]
    for _ in range(3):
        lb_backup = bellman_lb(model, lower, b).value
        ub_backup = bellman_ub(model, upper, b).value
        point_update(model, lower, upper, b)
        value = lower.value(b)[0]
        assert value >= lb_backup - 1e-8
        assert value >= previous - 1e-12
        assert upper.value(b) <= ub_backup + 1e-9
        assert value <= upper.value(b) + 1e-9
        previous = value


def test_particle_upper_bound_interpolation(carpark4):
    upper = UpperBoundSet(carpark4.global_bounds())
    near = ParticleBelief.create(START, [[0.5, 0.5]])
    other = ParticleBelief.create(START, [[0.25, 0.25]])
    both = ParticleBelief.create(START, [[0.5, 0.5], [0.25, 0.25]])
    upper.add(near, 100.0)
    assert ub_value(upper, near) == pytest.approx(100.0)
    # (U - L) * N_b * max |w - P| = 5000 * 2 * 0.5
    assert ub_value(upper, both) == pytest.approx(5100.0)
    upper.add(other, 300.0)
    assert ub_value(upper, both) == pytest.approx(200.0)
    assert upper.value(both) == pytest.approx(200.0)


def test_upper_bound_keeps_the_smaller_value(carpark4):
    upper = UpperBoundSet(carpark4.global_bounds())
    b = ParticleBelief.create(START, [[0.5, 0.5]])
    assert upper.add(b, 9000.0)
    assert upper.value(b) == pytest.approx(5000.0)
    assert upper.add(b, 100.0)
    assert not upper.add(b, 200.0)
    assert len(upper) == 1
    assert upper.value(b) == 100.0


def test_upper_bound_falls_back_to_u(carpark4):
    upper = UpperBoundSet(carpark4.global_bounds())
    upper.add(RegionBelief.create(START, [Polytope.box([0, 0], [1, 1])]), 10.0)
    assert ub_value(upper, ParticleBelief.create(START, [[0.5, 0.5]])) == pytest.approx(5000.0)
    assert ub_value(upper, ParticleBelief.create(AgentState(2, 1), [[0.5, 0.5]])) == pytest.approx(5000.0)


def test_region_upper_bound(carpark4):
    upper = UpperBoundSet(carpark4.global_bounds())
    whole = RegionBelief.create(START, [Polytope.box([0, 0], [1, 1])])
    half = RegionBelief.create(START, [Polytope.box([0, 0], [0.5, 1])])
    upper.add(whole, 50.0)
    assert ub_value(upper, whole) == pytest.approx(50.0)
    assert ub_value(upper, half) == pytest.approx(50.0 + 5000.0 * 0.5)
    upper.add(half, 10.0)
    assert ub_value(upper, half) == pytest.approx(10.0)


def test_max_density_region():
    boxes = [Polytope.box([0, 0], [1, 1]), Polytope.box([0.5, 0], [1.5, 1]), Polytope.box([3, 0], [4, 1])]
    densest, chosen = max_density_region(RegionBelief.create(START, boxes, [1.0, 1.0, 1.5]))
    assert sorted(chosen) == [0, 1]
    assert densest is not None
    lone, chosen = max_density_region(RegionBelief.create(START, boxes, [1.0, 1.0, 5.0]))
    assert chosen == [2]


def test_max_density_region_goes_greedy_past_the_budget():
    boxes = [Polytope.box([0, 0], [1 + 0.01 * i, 1]) for i in range(13)]
    region, chosen = max_density_region(RegionBelief.create(START, boxes))
    assert len(chosen) == 13


def test_exact_value_iteration_matches_the_bellman_backup():
    model = random_model(5, n_locs=1, n_pers=2)
    lower, _ = init_bounds(model, [])
    beliefs = [random_particles(model, seed, count=2) for seed in range(3)]
    for _ in range(2):
        nxt = exact_vi_step(model, lower)
        assert len(nxt) == len(model.actions) * len(lower) ** len(model.agent_states())
        for b in beliefs:
            assert nxt.value(b)[0] == pytest.approx(bellman_lb(model, lower, b).value, abs=1e-9)
        lower = nxt


def test_exact_value_iteration_budget():
    model = random_model(1)
    lower = LowerBound([AlphaFunction.constant(SQUARE, float(v)) for v in range(5)])
    with pytest.raises(BudgetExceededError):
        exact_vi_step(model, lower)


def test_expectation_of_backed_up_alpha_matches_backup(carpark4):
    b = ParticleBelief.create(SPOT, [[2.5, 3.5]])
    lower, upper = init_bounds(carpark4, [b])
    result = point_update(carpark4, lower, upper, b)
    assert expect_pwc(result.alpha, b) == pytest.approx(result.alpha_value)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_particle_upper_bound_is_convex_along_segments(carpark4, seed):
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.05, 0.95, size=(3, 2))
    upper = UpperBoundSet(carpark4.global_bounds())
    for _ in range(4):
        chosen = rng.choice(3, size=int(rng.integers(1, 4)), replace=False)
        stored = ParticleBelief.create(START, points[chosen], rng.dirichlet(np.ones(len(chosen))))
        upper.add(stored, float(rng.uniform(0.0, 5000.0)))
    b1 = ParticleBelief.create(START, points, rng.dirichlet(np.ones(3)))
    b2 = ParticleBelief.create(START, points, rng.dirichlet(np.ones(3)))
    ub1, ub2 = ub_value(upper, b1), ub_value(upper, b2)
    for lam in (0.25, 0.5, 0.75):
        mixed = mixture(b1, b2, lam)
        assert mixed.size == 3
        assert ub_value(upper, mixed) <= lam * ub1 + (1.0 - lam) * ub2 + 1e-6


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(100))
def test_region_backup_matches_direct_evaluation(seed):
    model = random_model(seed, n_locs=1 + seed % 3, n_pers=2 + seed % 3, n_actions=1 + (seed // 3) % 3,
                         n_components=1 + seed % 2)
    rng = np.random.default_rng(seed)
    bounds = model.global_bounds()
    choices = {state: _unit_grid_alpha(state, rng, bounds.L, bounds.U) for state in model.agent_states()}
    fallback = AlphaFunction.constant(SQUARE, bounds.L)
    regions = model.perception_fcp().regions
    state, region = regions[int(rng.integers(len(regions)))]
    action = model.actions[int(rng.integers(len(model.actions)))]
    checked = 0
    for poly, value in ispp_backup(model, region, state, action, choices, fallback):
        for x in _interior_samples(poly, rng):
            direct = backup_at(model, (state, x), action, choices, fallback)
            assert min(max(direct, bounds.L), bounds.U) == pytest.approx(value, abs=1e-9)
            checked += 1
    assert checked > 0
