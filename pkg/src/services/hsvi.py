"""Heuristic search value iteration over beliefs, bracketing the optimal value."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.core.loader import load_settings
from src.core.logger import get_logger
from src.models.belief import Belief, Branch, check_compatible
from src.models.nspomdp import NsPomdpModel
from src.services.alpha import LowerBound
from src.services.backup import bellman_ub, init_bounds, point_update, successor_branches
from src.services.upper import UpperBoundSet

logger = get_logger(__name__)

CONVERGED = 'converged'
BUDGET_EXHAUSTED = 'budget_exhausted'


@dataclass(frozen=True)
class SolveConfig:
    epsilon: float = 1e-3
    max_iterations: int = 10000
    max_depth: Optional[int] = None
    seed: Optional[int] = None
    seed_successors: bool = True
    record_nodes: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")

    @classmethod
    def from_settings(cls, **overrides) -> 'SolveConfig':
        solve = load_settings()['solve']
        values = {
            'epsilon': float(solve['epsilon']),
            'max_iterations': int(solve['max_iterations']),
            'seed_successors': bool(solve.get('seed_successors', True)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class TraceRow:
    iter: int
    lb: float
    ub: float
    gamma_size: int
    upsilon_size: int
    millis: float


@dataclass(frozen=True)
class NodeRecord:
    """Successor candidates weighed at one explore node: (action, agent state, probability, excess)."""
    depth: int
    candidates: Tuple[Tuple[object, object, float, float], ...]
    chosen: int


@dataclass
class SolveState:
    model: NsPomdpModel
    b0: Belief
    config: SolveConfig
    lower: LowerBound
    upper: UpperBoundSet
    max_depth: int
    trace: List[TraceRow] = field(default_factory=list)
    nodes: List[NodeRecord] = field(default_factory=list)
    status: str = BUDGET_EXHAUSTED
    iterations: int = 0
    updates: int = 0
    lb: float = -math.inf
    ub: float = math.inf

    @property
    def gap(self) -> float:
        return self.ub - self.lb

    def refresh(self):
        """Current bound values at b0, unclamped."""
        self.lb = self.lower.value(self.b0)[0]
        self.ub = self.upper.value(self.b0)

    def record(self, started: float):
        self.trace.append(TraceRow(
            iter=self.iterations,
            lb=self.lb,
            ub=self.ub,
            gamma_size=len(self.lower),
            upsilon_size=len(self.upper),
            millis=(time.perf_counter() - started) * 1000.0,
        ))


def width_depth(model: NsPomdpModel, epsilon: float, factor: float = 1.0) -> int:
    """Smallest t with epsilon * beta^-t >= factor * (U - L)."""
    bounds = model.global_bounds()
    spread = factor * (bounds.U - bounds.L)
    if spread <= epsilon:
        return 0
    return math.ceil(math.log(epsilon / spread) / math.log(model.beta))


def depth_cap(model: NsPomdpModel, epsilon: float, margin: int) -> int:
    return width_depth(model, epsilon, 2.0) + margin


def seed_beliefs(model: NsPomdpModel, b0: Belief) -> List[Belief]:
    seeds = [b0]
    for action in model.available_actions(b0.agent_state):
        seeds.extend(branch.belief for branch in successor_branches(model, b0, action))
    return seeds


def excess(state: SolveState, branch: Branch, t: int) -> float:
    """Weighted excess gap of a successor reached at depth t + 1."""
    lb, _ = state.lower.value(branch.belief)
    ub = state.upper.value(branch.belief)
    return branch.probability * (ub - lb - state.config.epsilon * state.model.beta ** (t + 1))


def explore(b: Belief, t: int, state: SolveState):
    model, eps = state.model, state.config.epsilon
    lb, _ = state.lower.value(b)
    ub = state.upper.value(b)
    if t >= state.max_depth or ub - lb <= eps * model.beta ** (-t):
        return

    maximisers = bellman_ub(model, state.upper, b).actions
    point_update(model, state.lower, state.upper, b)
    state.updates += 1

    candidates = []
    for action in maximisers:
        for branch in successor_branches(model, b, action):
            candidates.append((action, branch, excess(state, branch, t)))
    if not candidates:
        return
    chosen = max(range(len(candidates)), key=lambda i: (candidates[i][2], -i))
    if state.config.record_nodes:
        state.nodes.append(NodeRecord(
            depth=t,
            candidates=tuple((a, br.agent_state, br.probability, ex) for a, br, ex in candidates),
            chosen=chosen,
        ))
    logger.debug(f"Explore depth {t}: gap {ub - lb:.6g}, {len(candidates)} candidates, "
                 f"next {candidates[chosen][1].agent_state} via {candidates[chosen][0]!r}")

    explore(candidates[chosen][1].belief, t + 1, state)
    point_update(model, state.lower, state.upper, b)
    state.updates += 1


def solve(model: NsPomdpModel, b0: Belief, config: Optional[SolveConfig] = None) -> SolveState:
    config = config or SolveConfig.from_settings()
    check_compatible(model, b0)
    margin = int(load_settings()['solve'].get('depth_margin', 5))
    recommended = depth_cap(model, config.epsilon, margin)
    max_depth = recommended if config.max_depth is None else config.max_depth
    if max_depth < width_depth(model, config.epsilon):
        logger.warning(f"Depth cap {max_depth} is below the recommended {recommended}")

    seeds = seed_beliefs(model, b0) if config.seed_successors else [b0]
    lower, upper = init_bounds(model, seeds)
    logger.info(f"Solving {model.name}: epsilon={config.epsilon}, depth cap {max_depth}, "
                f"{len(seeds)} upper bound seeds, seed={config.seed}")

    state = SolveState(model, b0, config, lower, upper, max_depth)
    started = time.perf_counter()
    state.refresh()
    state.record(started)
    while state.gap > config.epsilon and state.iterations < config.max_iterations:
        explore(b0, 0, state)
        state.iterations += 1
        state.refresh()
        state.record(started)
        logger.info(f"Iteration {state.iterations}: lb={state.lb:.6f} ub={state.ub:.6f} "
                    f"|Gamma|={len(lower)} |Upsilon|={len(upper)}")

    state.status = CONVERGED if state.gap <= config.epsilon else BUDGET_EXHAUSTED
    logger.info(f"Solve {state.status} after {state.iterations} iterations: lb={state.lb:.6f} "
                f"ub={state.ub:.6f} gap={state.gap:.3g}")
    return state
