"""Bellman backups of both bounds, the region backup for alpha-functions and point updates."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.core.exceptions import BudgetExceededError
from src.core.loader import get_budget, get_tolerances
from src.core.logger import get_logger
from src.geometry import (
    Fcp,
    Polytope,
    affine_image,
    affine_preimage,
    boxes_overlap,
    interior_point,
    intersect,
    is_solid,
    product_fcp,
    region_box,
    remove_redundant
)
from src.models.belief import Belief, Branch, branches, expect_pwc, support_mass
from src.models.nspomdp import AgentState, NsPomdpModel
from src.services.alpha import AlphaFunction, LowerBound
from src.services.upper import UpperBoundSet, seed_values
from src.utils.pool import run_ordered

logger = get_logger(__name__)

_BRANCH_CACHE_LIMIT = 200000

Choices = Mapping[AgentState, AlphaFunction]


def successor_branches(model: NsPomdpModel, b: Belief, action) -> List[Branch]:
    """branches() memoised on the model by belief key."""
    cache = model._cache.setdefault('branches', {})
    key = (b.key, action)
    found = cache.get(key)
    if found is None:
        if len(cache) >= _BRANCH_CACHE_LIMIT:
            cache.clear()
        found = branches(model, b, action)
        cache[key] = found
    return found


def init_bounds(model: NsPomdpModel, seed_beliefs: Sequence[Belief]) -> Tuple[LowerBound, UpperBoundSet]:
    bounds = model.global_bounds()
    lower = LowerBound([AlphaFunction.constant(model.domain, bounds.R_LB)])
    upper = UpperBoundSet(bounds)
    added = seed_values(upper, seed_beliefs)
    if not added:
        logger.warning("No upper bound seed beliefs; the upper bound is U everywhere until updated")
    logger.debug(f"Initial bounds: R_LB={bounds.R_LB}, U={bounds.U}, {added} seed beliefs")
    return lower, upper


@dataclass(frozen=True)
class Backup:
    value: float
    actions: Tuple
    q: Dict

    @property
    def action(self):
        return self.actions[0]


def _maximise(q: Dict) -> Backup:
    best = max(q.values())
    tol = get_tolerances().eps_num * max(1.0, abs(best))
    return Backup(best, tuple(a for a, v in q.items() if v >= best - tol), q)


def bellman_lb(model: NsPomdpModel, lower: LowerBound, b: Belief) -> Backup:
    q = {}
    for action in model.available_actions(b.agent_state):
        future = sum(br.probability * lower.value(br.belief)[0] for br in successor_branches(model, b, action))
        q[action] = expect_pwc(model.reward_function(action), b) + model.beta * future
    return _maximise(q)


def bellman_ub(model: NsPomdpModel, upper: UpperBoundSet, b: Belief) -> Backup:
    q = {}
    for action in model.available_actions(b.agent_state):
        future = sum(br.probability * upper.value(br.belief) for br in successor_branches(model, b, action))
        q[action] = expect_pwc(model.reward_function(action), b) + model.beta * future
    return _maximise(q)


def bval(model: NsPomdpModel, s, action, next_state, alpha: AlphaFunction) -> float:
    """Discounted alpha mass reaching next_state from the concrete state s."""
    next_state = AgentState(*next_state)
    total = 0.0
    for (state, x_next), prob in model.successors(s, action):
        if state == next_state:
            total += prob * alpha.value(state, x_next)
    return model.beta * total


def backup_at(model: NsPomdpModel, s, action, choices: Choices, fallback: AlphaFunction) -> float:
    """R_a(s) plus the discounted chosen alpha values over the successors of s."""
    total = model.reward(s, action)
    for (state, x_next), prob in model.successors(s, action):
        total += model.beta * prob * choices.get(state, fallback).value(state, x_next)
    return total


def _component_split(model: NsPomdpModel, region: Polytope, loc, component, choices: Choices,
                     fallback: AlphaFunction) -> List[Tuple[Polytope, None]]:
    """Subregions of region whose images stay in one percept cell and one alpha piece."""
    cells = model.env_partition(loc).regions
    out = []
    for piece in component.pieces:
        source = intersect(region, piece.guard)
        if not is_solid(source):
            continue
        image = remove_redundant(affine_image(source, piece.map))
        image_box = region_box(image)
        for cell, per in cells:
            if not boxes_overlap(image_box, region_box(cell)):
                continue
            part = intersect(image, cell)
            if not is_solid(part):
                continue
            state = AgentState(loc, per)
            for poly, _ in choices.get(state, fallback).pieces(state):
                if not boxes_overlap(region_box(part), region_box(poly)):
                    continue
                split = intersect(part, poly)
                if not is_solid(split):
                    continue
                back = intersect(affine_preimage(split, piece.map), source)
                if is_solid(back):
                    out.append((remove_redundant(back), None))
    return out


def ispp_backup(model: NsPomdpModel, region: Polytope, agent_state, action, choices: Choices,
                fallback: Optional[AlphaFunction] = None) -> Fcp:
    """Image, split, preimage and product: a partition of region on which the backup is constant."""
    agent_state = AgentState(*agent_state)
    if fallback is None:
        fallback = AlphaFunction.constant(model.domain, model.global_bounds().L)
    successors = model.agent_successors(agent_state, action)
    key = (region.A.tobytes(), region.b.tobytes(), agent_state, action, fallback.uid,
           tuple((AgentState(loc, per), choices.get(AgentState(loc, per), fallback).uid)
                 for loc, _ in successors for per in model.pers))
    memo = model._cache.setdefault('ispp', {})
    if key in memo:
        return memo[key]

    partition = Fcp.single(region, None)
    for loc, _ in successors:
        for component in model.env_dyn[action].components:
            split = _component_split(model, region, loc, component, choices, fallback)
            if split:
                partition = product_fcp(partition, Fcp(split, model.dim), lambda a, b: None)
    partition = product_fcp(partition, model.reward_fcp(action), lambda a, b: None)

    bounds = model.global_bounds()
    pieces = []
    for poly, _ in partition.regions:
        x = interior_point(poly)
        value = backup_at(model, (agent_state, x), action, choices, fallback)
        pieces.append((poly, min(max(value, bounds.L), bounds.U)))
    result = Fcp(pieces, model.dim)
    logger.debug(f"Region backup at {agent_state} under {action!r}: {len(result)} regions")
    memo[key] = result
    return result


def alpha_star(model: NsPomdpModel, b: Belief, action, choices: Choices,
               fallback: AlphaFunction) -> AlphaFunction:
    """Backed-up alpha on the regions of b's agent state that carry belief mass, L everywhere else."""
    state = b.agent_state
    bounds = model.global_bounds()
    regions = model.perception_fcp().for_state(state)
    loaded = [region for region in regions if support_mass(b, region) > 0.0]
    backed = dict(zip(map(id, loaded), run_ordered(
        lambda region: ispp_backup(model, region, state, action, choices, fallback), loaded)))
    pieces = []
    for region in regions:
        if id(region) in backed:
            pieces.extend(backed[id(region)].regions)
        else:
            pieces.append((region, bounds.L))
    return AlphaFunction({state: pieces}, bounds.L, model.domain)


@dataclass(frozen=True)
class PointUpdate:
    action: object
    alpha: AlphaFunction
    alpha_value: float
    added: bool
    lb_before: float
    p_star: float


def point_update(model: NsPomdpModel, lower: LowerBound, upper: UpperBoundSet, b: Belief) -> PointUpdate:
    """One point-based update of both bounds at b; lower and upper are updated in place."""
    lb_before, _ = lower.value(b)
    action = bellman_lb(model, lower, b).action
    choices = {}
    for branch in successor_branches(model, b, action):
        _, idx = lower.value(branch.belief)
        choices[branch.agent_state] = lower[idx]
    alpha = alpha_star(model, b, action, choices, lower[0])
    alpha_value = expect_pwc(alpha, b)
    added = alpha_value > lb_before + get_tolerances().eps_prune
    if added:
        lower.add(alpha)
    p_star = bellman_ub(model, upper, b).value
    upper.add(b, p_star)
    return PointUpdate(action, alpha, alpha_value, added, lb_before, p_star)


def exact_vi_step(model: NsPomdpModel, lower: LowerBound) -> LowerBound:
    """Full value-iteration step over every action and every alpha choice per agent state."""
    states = model.agent_states()
    size = len(model.actions) * len(lower) ** len(states)
    budget = get_budget('exact_vi_max_alphas')
    if size > budget:
        raise BudgetExceededError(f"Exact value iteration needs {size} alpha-functions, budget is {budget}")
    bounds = model.global_bounds()
    fcp = model.perception_fcp()
    out: List[AlphaFunction] = []
    for action in model.actions:
        for picks in product(range(len(lower)), repeat=len(states)):
            choices = {state: lower[idx] for state, idx in zip(states, picks)}
            regions = {}
            for state in states:
                if action not in model.available_actions(state):
                    continue
                pieces = []
                for region in fcp.for_state(state):
                    pieces.extend(ispp_backup(model, region, state, action, choices, lower[0]).regions)
                regions[state] = pieces
            out.append(AlphaFunction(regions, bounds.L, model.domain))
    logger.info(f"Exact value iteration step: {len(lower)} -> {len(out)} alpha-functions")
    return LowerBound(out)
