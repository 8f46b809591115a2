"""One-step lookahead strategy on a lower bound and seeded path simulation."""
from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import BeliefError, ZeroProbabilityObservationError
from src.core.logger import get_logger
from src.geometry import bounding_box, contains
from src.models.belief import Belief, ParticleBelief, update
from src.models.nspomdp import AgentState, NsPomdpModel
from src.services.alpha import LowerBound
from src.services.backup import bellman_lb
from src.utils.pool import run_ordered

logger = get_logger(__name__)


class LookaheadStrategy:
    """Picks the first maximiser of the lower-bound backup at the current belief."""

    def __init__(self, model: NsPomdpModel, lower: LowerBound):
        self.model = model
        self.lower = LowerBound(list(lower))

    def next_action(self, b: Belief):
        return bellman_lb(self.model, self.lower, b).action

    def value(self, b: Belief) -> float:
        return self.lower.value(b)[0]


@dataclass(frozen=True)
class PathStep:
    agent_state: AgentState
    point: np.ndarray
    belief: Belief
    action: object
    reward: float
    observation: AgentState


@dataclass
class PathRecord:
    steps: List[PathStep] = field(default_factory=list)
    discounted_return: float = 0.0
    compliance: Optional[float] = None
    mean_trust: Optional[float] = None
    truncation: float = 0.0

    def returns_so_far(self, beta: float) -> List[float]:
        out, total = [], 0.0
        for k, step in enumerate(self.steps):
            total += beta ** k * step.reward
            out.append(total)
        return out


def sample_point(b: Belief, rng: np.random.Generator) -> np.ndarray:
    if isinstance(b, ParticleBelief):
        return np.array(b.points[rng.choice(b.size, p=b.weights)])
    masses = b.masses()
    region = b.regions[rng.choice(b.size, p=masses / masses.sum())]
    lo, hi = bounding_box(region)
    for _ in range(10000):
        x = rng.uniform(lo, hi)
        if contains(region, x):
            return x
    raise BeliefError("Could not sample a point inside a belief region")


def _step(model: NsPomdpModel, state: AgentState, x: np.ndarray, action, rng: np.random.Generator):
    locs = model.agent_successors(state, action)
    probs = np.array([p for _, p in locs])
    loc = locs[rng.choice(len(locs), p=probs / probs.sum())][0]
    components = model.env_dyn[action].components
    weights = np.array([c.weight for c in components])
    component = components[rng.choice(len(components), p=weights / weights.sum())]
    x_next = component.piece_at(x).map.apply(x)
    return AgentState(loc, model.observe(loc, x_next)), x_next


def simulate(model: NsPomdpModel, strategy: LookaheadStrategy, b0: Belief,
             true_state: Optional[Tuple[AgentState, np.ndarray]] = None, horizon: int = 50,
             rng: Optional[np.random.Generator] = None) -> PathRecord:
    rng = rng if rng is not None else np.random.default_rng()
    if true_state is None:
        state, x = b0.agent_state, sample_point(b0, rng)
    else:
        state, x = AgentState(*true_state[0]), np.asarray(true_state[1], dtype=float)
    if state != b0.agent_state:
        raise BeliefError(f"True agent state {state} differs from the belief's {b0.agent_state}")

    record = PathRecord()
    b = b0
    compliant = []
    for k in range(horizon):
        action = strategy.next_action(b)
        reward = model.reward((state, x), action)
        next_state, x_next = _step(model, state, x, action, rng)
        record.steps.append(PathStep(state, x, b, action, reward, next_state))
        record.discounted_return += model.beta ** k * reward
        flag = model.is_compliant(state, action)
        if flag is not None:
            compliant.append(flag)
        try:
            b = update(model, b, action, next_state)
        except ZeroProbabilityObservationError as e:
            raise BeliefError(f"Observation {next_state} at step {k} is outside the belief support") from e
        state, x = next_state, x_next

    if compliant:
        record.compliance = float(np.mean(compliant))
    if record.steps and all(isinstance(s.agent_state.loc, Number) for s in record.steps):
        record.mean_trust = float(np.mean([s.agent_state.loc for s in record.steps]))
    bounds = model.global_bounds()
    record.truncation = model.beta ** horizon * (bounds.U - bounds.L)
    return record


def simulate_runs(model: NsPomdpModel, strategy: LookaheadStrategy, b0: Belief, runs: int,
                  horizon: int, seed: int = 0, true_states: Optional[Sequence] = None) -> List[PathRecord]:
    """Independent runs, each on a generator derived from (seed, run index)."""
    def one(run: int) -> PathRecord:
        start = true_states[run % len(true_states)] if true_states else None
        return simulate(model, strategy, b0, start, horizon, np.random.default_rng([seed, run]))

    records = run_ordered(one, range(runs))
    if records:
        returns = np.array([r.discounted_return for r in records])
        logger.info(f"Simulated {runs} runs of {horizon} steps: mean return {returns.mean():.4f} "
                    f"(std {returns.std():.4f})")
    return records
