"""The NS-POMDP model: agent and environment dynamics, perception, PWC rewards."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, NamedTuple, Optional, Tuple

import numpy as np

from src.core.exceptions import (
    PerceptCompatibilityError,
    UnavailableActionError
)
from src.core.loader import get_tolerances
from src.core.logger import get_logger
from src.geometry import (
    AffineMap,
    Fcp,
    Polytope,
    affine_image,
    affine_preimage,
    bounding_box,
    contains,
    difference,
    intersect,
    is_solid,
    partition_issues,
    product_fcp,
    remove_redundant,
    vertices
)
from src.geometry.polytope import violation
from src.models.perception import PerceptionFcp, PerceptionSpec, perception_fcp

logger = get_logger(__name__)

Label = Hashable
Action = Hashable


class AgentState(NamedTuple):
    loc: Label
    per: Label

    def __str__(self) -> str:
        return f"{self.loc}:{self.per}"


@dataclass(frozen=True, eq=False)
class Piece:
    guard: Polytope
    map: AffineMap


@dataclass(frozen=True, eq=False)
class Component:
    weight: float
    pieces: Tuple[Piece, ...]

    def piece_at(self, x) -> Piece:
        for piece in self.pieces:
            if contains(piece.guard, x):
                return piece
        return min(self.pieces, key=lambda p: violation(p.guard, x))


@dataclass(frozen=True, eq=False)
class EnvDynamics:
    components: Tuple[Component, ...]

    def step(self, x) -> List[Tuple[np.ndarray, float]]:
        """Image of x under every mixture component, with its weight."""
        return [(comp.piece_at(x).map.apply(x), comp.weight) for comp in self.components]


@dataclass(frozen=True)
class GlobalBounds:
    L: float
    U: float
    R_LB: float


class EnvPwc:
    """A PWC function over S that ignores the agent state."""

    def __init__(self, fcp: Fcp):
        self.fcp = fcp

    def pieces(self, agent_state) -> List[Tuple[Polytope, float]]:
        return self.fcp.regions

    def value(self, agent_state, x) -> float:
        idx = self.fcp.locate(x)
        if idx is None:
            idx = self.fcp.nearest(x)
        return self.fcp.regions[idx][1]


@dataclass(eq=False)
class NsPomdpModel:
    name: str
    locs: Tuple[Label, ...]
    pers: Tuple[Label, ...]
    actions: Tuple[Action, ...]
    domain: Polytope
    available_default: Tuple[Action, ...]
    available: Dict[AgentState, Tuple[Action, ...]]
    delta_A: Dict[Tuple[AgentState, Action], Dict[Label, float]]
    env_dyn: Dict[Action, EnvDynamics]
    perception: PerceptionSpec
    reward_action: Dict[Action, Fcp]
    reward_state: Fcp
    beta: float
    suggested: Optional[Dict[Label, Tuple[Action, ...]]] = None
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def agent_states(self) -> List[AgentState]:
        return [AgentState(loc, per) for loc in self.locs for per in self.pers]

    def agent_state_index(self, state: AgentState) -> int:
        if 'state_index' not in self._cache:
            self._cache['state_index'] = {s: i for i, s in enumerate(self.agent_states())}
        return self._cache['state_index'][state]

    def available_actions(self, state: AgentState) -> Tuple[Action, ...]:
        return self.available.get(AgentState(*state), self.available_default)

    def check_action(self, state: AgentState, action: Action):
        if action not in self.available_actions(state):
            raise UnavailableActionError(f"Action {action!r} is not available at agent state {state}")

    def agent_successors(self, state: AgentState, action: Action) -> List[Tuple[Label, float]]:
        row = self.delta_A.get((AgentState(*state), action), {})
        return [(loc, row[loc]) for loc in self.locs if row.get(loc, 0.0) > 0.0]

    def observe(self, loc: Label, x) -> Label:
        return self.perception.observe(loc, x)

    def is_compatible(self, state: AgentState, x) -> bool:
        return self.observe(state[0], x) == state[1]

    def env_partition(self, loc: Label) -> Fcp:
        return self.perception.env_partition(loc)

    def perception_fcp(self) -> PerceptionFcp:
        if 'perception_fcp' not in self._cache:
            self._cache['perception_fcp'] = perception_fcp(self.perception, self.agent_states())
        return self._cache['perception_fcp']

    def percept_regions(self, state: AgentState) -> List[Polytope]:
        """Regions of the perception partition belonging to state."""
        return self.perception.cells(state[0], state[1])

    def successors(self, s, action: Action) -> List[Tuple[Tuple[AgentState, np.ndarray], float]]:
        state, x = AgentState(*s[0]), np.asarray(s[1], dtype=float)
        self.check_action(state, action)
        if not self.is_compatible(state, x):
            raise PerceptCompatibilityError(f"State ({state}, {x.tolist()}) is not percept compatible")
        eps = get_tolerances().eps_num
        out: List[List] = []
        images = self.env_dyn[action].step(x)
        for loc, p_loc in self.agent_successors(state, action):
            for x_next, weight in images:
                next_state = AgentState(loc, self.observe(loc, x_next))
                prob = p_loc * weight
                for entry in out:
                    if entry[0] == next_state and np.linalg.norm(entry[1] - x_next) <= eps:
                        entry[2] += prob
                        break
                else:
                    out.append([next_state, x_next, prob])
        return [((state_next, x_next), prob) for state_next, x_next, prob in out]

    def reward_fcp(self, action: Action) -> Fcp:
        key = ('reward_fcp', action)
        if key not in self._cache:
            self._cache[key] = product_fcp(self.reward_action[action], self.reward_state, lambda a, b: a + b)
        return self._cache[key]

    def reward_function(self, action: Action) -> EnvPwc:
        key = ('reward_pwc', action)
        if key not in self._cache:
            self._cache[key] = EnvPwc(self.reward_fcp(action))
        return self._cache[key]

    def reward(self, s, action: Action) -> float:
        state, x = AgentState(*s[0]), np.asarray(s[1], dtype=float)
        self.check_action(state, action)
        return self.reward_function(action).value(state, x)

    def global_bounds(self) -> GlobalBounds:
        if 'bounds' not in self._cache:
            lows, highs = [], []
            for action in self.actions:
                values = [value for _, value in self.reward_fcp(action).regions]
                lows.append(min(values))
                highs.append(max(values))
            horizon = 1.0 - self.beta
            bounds = GlobalBounds(L=min(lows) / horizon, U=max(highs) / horizon, R_LB=max(lows) / horizon)
            logger.debug(f"Model {self.name}: L={bounds.L}, U={bounds.U}, R_LB={bounds.R_LB}")
            self._cache['bounds'] = bounds
        return self._cache['bounds']

    def is_compliant(self, state: AgentState, action: Action) -> Optional[bool]:
        if self.suggested is None:
            return None
        return action in self.suggested.get(state[1], ())


def stay_pieces(domain: Polytope, move: AffineMap) -> Tuple[Piece, ...]:
    """Pieces of a move that keeps the point in place whenever the move would leave the domain."""
    inside = remove_redundant(intersect(affine_preimage(domain, move), domain))
    pieces = []
    if is_solid(inside):
        pieces.append(Piece(inside, move))
    for rest in difference(domain, inside) if is_solid(inside) else [domain]:
        pieces.append(Piece(rest, AffineMap.identity(domain.dim)))
    return tuple(pieces)


def _image_inside(domain: Polytope, guard: Polytope, move: AffineMap) -> bool:
    region = intersect(guard, domain)
    if not is_solid(region):
        return True
    pts = vertices(affine_image(region, move))
    tol = 1e-7 * max(1.0, float(np.max(np.abs(domain.b))))
    return bool(np.all(pts @ domain.A.T <= domain.b + tol))


def validate_model(model: NsPomdpModel, witness_samples: int = 0) -> List[str]:
    """Every violated model invariant, each naming where it occurs.

    With witness_samples > 0 the pre-image partition is also spot-checked
    (see preimage_witness_issues).
    """
    issues: List[str] = []
    if not 0.0 < model.beta < 1.0:
        issues.append(f"beta must lie in (0, 1), got {model.beta}")
    for name, labels in (('locs', model.locs), ('pers', model.pers), ('actions', model.actions)):
        if not labels:
            issues.append(f"{name} is empty")
        elif len(set(labels)) != len(labels):
            issues.append(f"{name} contains duplicates")

    for state, actions in [(None, model.available_default)] + list(model.available.items()):
        where = 'available.default' if state is None else f"available[{state}]"
        for action in actions:
            if action not in model.actions:
                issues.append(f"{where}: unknown action {action!r}")
        if state is not None and (state.loc not in model.locs or state.per not in model.pers):
            issues.append(f"{where}: unknown agent state")

    for state in model.agent_states():
        for action in model.available_actions(state):
            row = model.delta_A.get((state, action))
            if row is None:
                issues.append(f"delta_A row ({state}, {action}) is missing")
                continue
            for loc, prob in row.items():
                if loc not in model.locs:
                    issues.append(f"delta_A row ({state}, {action}): unknown location {loc!r}")
                if prob < 0:
                    issues.append(f"delta_A row ({state}, {action}): negative probability {prob}")
            total = sum(row.values())
            if abs(total - 1.0) > 1e-12:
                issues.append(f"delta_A row ({state}, {action}) sums to {total:.12g}")

    check_geometry = model.dim <= 3
    for action in model.actions:
        dyn = model.env_dyn.get(action)
        if dyn is None:
            issues.append(f"env_dynamics: no dynamics for action {action!r}")
            continue
        weights = [comp.weight for comp in dyn.components]
        if not weights or any(w <= 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            issues.append(f"env_dynamics[{action}]: mixture weights {weights} must be positive and sum to 1")
        for ci, comp in enumerate(dyn.components):
            where = f"env_dynamics[{action}][{ci}]"
            for pi, piece in enumerate(comp.pieces):
                if piece.map.dim != model.dim or piece.guard.dim != model.dim:
                    issues.append(f"{where} piece {pi}: dimension mismatch")
                    continue
                if not piece.map.invertible:
                    issues.append(f"{where} piece {pi}: map is not invertible")
                elif check_geometry and not _image_inside(model.domain, piece.guard, piece.map):
                    issues.append(f"{where} piece {pi}: image leaves the domain")
            if check_geometry and comp.pieces:
                guards = Fcp([(piece.guard, pi) for pi, piece in enumerate(comp.pieces)], model.dim)
                for problem in partition_issues(guards, model.domain):
                    issues.append(f"{where} guards: {problem}")

    if check_geometry:
        sources = [('default', model.perception.default)] + list(model.perception.per_loc.items())
        for where, src in sources:
            if isinstance(src, Fcp):
                for problem in partition_issues(src, model.domain):
                    issues.append(f"perception[{where}]: {problem}")
                for _, label in src.regions:
                    if label not in model.pers:
                        issues.append(f"perception[{where}]: unknown percept {label!r}")
                        break
        for problem in partition_issues(model.reward_state, model.domain):
            issues.append(f"reward_state: {problem}")
        for action in model.actions:
            fcp = model.reward_action.get(action)
            if fcp is None:
                issues.append(f"reward_action: no reward for action {action!r}")
                continue
            for problem in partition_issues(fcp, model.domain):
                issues.append(f"reward_action[{action}]: {problem}")
        if witness_samples > 0 and not issues:
            issues.extend(preimage_witness_issues(model, witness_samples))
    return issues


def _interior_samples(region: Polytope, rng: np.random.Generator, count: int, attempts: int = 4000) -> np.ndarray:
    lo, hi = bounding_box(region)
    candidates = rng.uniform(lo, hi, size=(attempts, region.dim))
    inside = np.all(candidates @ region.A.T < region.b - 1e-7, axis=1)
    return candidates[inside][:count]


def _successor_signature(model: NsPomdpModel, state: AgentState, x, action: Action) -> Dict[int, float]:
    regions = model.perception_fcp().regions
    signature: Dict[int, float] = {}
    for (next_state, x_next), prob in model.successors((state, x), action):
        for idx, (owner, poly) in enumerate(regions):
            if owner == next_state and contains(poly, x_next):
                signature[idx] = signature.get(idx, 0.0) + prob
                break
    return signature


def _same_signature(a: Dict[int, float], b: Dict[int, float], tol: float) -> bool:
    return a.keys() == b.keys() and all(abs(a[k] - b[k]) <= tol for k in a)


def preimage_witness_issues(model: NsPomdpModel, samples: int = 10, seed: int = 0,
                            tol: float = 1e-9) -> List[str]:
    """Regions of perception x reward whose sampled states reach different successor regions.

    All states of one region must reach the same perception regions with the
    same aggregate probabilities.
    """
    rng = np.random.default_rng(seed)
    issues: List[str] = []
    for action in model.actions:
        rewards = model.reward_fcp(action).regions
        for owner, cell in model.perception_fcp().regions:
            state = AgentState(*owner)
            if action not in model.available_actions(state):
                continue
            for poly, _ in rewards:
                region = intersect(cell, poly)
                if not is_solid(region):
                    continue
                points = _interior_samples(region, rng, samples)
                if len(points) < 2:
                    continue
                first = _successor_signature(model, state, points[0], action)
                if any(not _same_signature(first, _successor_signature(model, state, x, action), tol)
                       for x in points[1:]):
                    issues.append(f"pre-image[{state}, {action}]: sampled states reach different successor regions")
                    break
    logger.debug(f"Model {model.name}: {len(issues)} pre-image witness issue(s)")
    return issues
