"""Finite-horizon values of particle beliefs by unrolling the belief tree."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from src.core.exceptions import BeliefError, BudgetExceededError
from src.core.loader import get_budget
from src.core.logger import get_logger
from src.models.belief import ParticleBelief, expect_pwc
from src.models.nspomdp import NsPomdpModel
from src.services.backup import successor_branches

logger = get_logger(__name__)


@dataclass(frozen=True)
class HorizonValue:
    h: int
    value: float
    lower: float
    upper: float
    nodes: int

    @property
    def bracket(self) -> Tuple[float, float]:
        return self.lower, self.upper


class _Unroller:

    def __init__(self, model: NsPomdpModel, budget: int):
        self.model = model
        self.budget = budget
        self.memo: Dict[Tuple[tuple, int], float] = {}
        self.nodes = 0

    def value(self, b: ParticleBelief, k: int) -> float:
        if k == 0:
            return 0.0
        key = (b.key, k)
        found = self.memo.get(key)
        if found is not None:
            return found
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(f"Belief tree exceeds {self.budget} nodes")
        model = self.model
        best = None
        for action in model.available_actions(b.agent_state):
            total = expect_pwc(model.reward_function(action), b)
            for branch in successor_branches(model, b, action):
                total += model.beta * branch.probability * self.value(branch.belief, k - 1)
            if best is None or total > best:
                best = total
        self.memo[key] = best
        return best


def finite_horizon_value(model: NsPomdpModel, b0: ParticleBelief, h: int,
                         budget: Optional[int] = None) -> HorizonValue:
    """Optimal h-step discounted value at b0, with the bracket that contains the infinite-horizon value."""
    if not isinstance(b0, ParticleBelief):
        raise BeliefError("The horizon oracle only unrolls particle beliefs")
    if h < 0:
        raise ValueError(f"Horizon must be nonnegative, got {h}")
    unroller = _Unroller(model, budget if budget is not None else get_budget('oracle_max_nodes'))
    value = unroller.value(b0, h)
    bounds = model.global_bounds()
    tail = model.beta ** h
    logger.info(f"Horizon {h} value {value:.6f} over {unroller.nodes} belief nodes")
    return HorizonValue(h, value, value + tail * bounds.L, value + tail * bounds.U, unroller.nodes)
