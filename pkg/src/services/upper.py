"""The belief-value upper bound set and its LP interpolation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.loader import get_budget
from src.core.logger import get_logger
from src.geometry import Polytope, boxes_overlap, intersect, is_solid, region_box, volume
from src.geometry import linprog
from src.models.belief import Belief, ParticleBelief, RegionBelief
from src.models.nspomdp import AgentState, GlobalBounds

logger = get_logger(__name__)


@dataclass(frozen=True)
class UpperPoint:
    belief: Belief
    value: float


class UpperBoundSet:
    """Upsilon, indexed by agent state. A belief already present keeps the smaller value."""

    def __init__(self, bounds: GlobalBounds):
        self.bounds = bounds
        self.points: Dict[AgentState, List[UpperPoint]] = {}
        self._index: Dict[tuple, Tuple[AgentState, int]] = {}
        self.version = 0
        self._cache: Dict[tuple, Tuple[int, float]] = {}

    def __len__(self) -> int:
        return sum(len(entries) for entries in self.points.values())

    def __iter__(self):
        for entries in self.points.values():
            yield from entries

    def entries(self, agent_state) -> List[UpperPoint]:
        return self.points.get(AgentState(*agent_state), [])

    def add(self, b: Belief, value: float) -> bool:
        """Store (b, value) clamped to [L, U]; True when the set changed."""
        value = min(max(float(value), self.bounds.L), self.bounds.U)
        found = self._index.get(b.key)
        if found is not None:
            state, idx = found
            if value >= self.points[state][idx].value:
                return False
            self.points[state][idx] = UpperPoint(b, value)
        else:
            entries = self.points.setdefault(b.agent_state, [])
            self._index[b.key] = (b.agent_state, len(entries))
            entries.append(UpperPoint(b, value))
        self.version += 1
        return True

    def value(self, b: Belief) -> float:
        cached = self._cache.get(b.key)
        if cached is not None and cached[0] == self.version:
            return cached[1]
        result = ub_value(self, b)
        self._cache[b.key] = (self.version, result)
        return result


def ub_value(upper: UpperBoundSet, b: Belief) -> float:
    if isinstance(b, ParticleBelief):
        return ub_value_particle(upper, b)
    return ub_value_region(upper, b)


def _matching(upper: UpperBoundSet, b: Belief) -> List[UpperPoint]:
    entries = upper.entries(b.agent_state)
    same = [e for e in entries if e.belief.kind == b.kind]
    if entries and not same:
        logger.warning(f"Upper bound for a {b.kind} belief at {b.agent_state} has only "
                       f"{entries[0].belief.kind} entries; using U")
    return same


def _solve_interpolation(values: np.ndarray, penalty: float, constraints) -> Optional[float]:
    """min sum(lambda*y) + penalty*c over the simplex with c >= 0 and the given rows."""
    m = len(values)
    objective = np.concatenate([values, [penalty]])
    rows = [(np.concatenate([np.ones(m), [0.0]]), linprog.EQ, 1.0)]
    rows.extend(constraints)
    bounds = [(0.0, None)] * (m + 1)
    outcome = linprog.solve(linprog.LinearProgram(objective, rows, 'min', bounds))
    if not outcome.optimal:
        logger.debug(f"Interpolation LP over {m} points ended {outcome.status}")
        return None
    return float(outcome.value)


def ub_value_particle(upper: UpperBoundSet, b: ParticleBelief) -> float:
    """min sum(lambda_k y_k) + (U - L) N_b c with c >= |w_i - sum(lambda_k P(x_i; b_k))|."""
    entries = _matching(upper, b)
    bounds = upper.bounds
    if not entries:
        return bounds.U
    penalty = (bounds.U - bounds.L) * b.size
    y = np.array([e.value for e in entries])
    # P[k, i]: mass the k-th stored belief puts on particle i of b
    P = np.array([[e.belief.mass_at(x) for x in b.points] for e in entries])
    w = np.asarray(b.weights)
    single = y + penalty * np.max(np.abs(w[None, :] - P), axis=1)
    best_vertex = float(np.min(single))
    if len(entries) == 1:
        return best_vertex
    constraints = []
    for i, wi in enumerate(w):
        constraints.append((np.concatenate([P[:, i], [1.0]]), linprog.GE, float(wi)))
        constraints.append((np.concatenate([-P[:, i], [1.0]]), linprog.GE, -float(wi)))
    value = _solve_interpolation(y, penalty, constraints)
    if value is None:
        return best_vertex
    return min(value, best_vertex)


def max_density_region(b: RegionBelief) -> Tuple[Polytope, List[int]]:
    """Largest-total-density set of regions with a solid common intersection."""
    order = [int(i) for i in np.argsort(-np.asarray(b.densities), kind='stable')]
    densities = np.asarray(b.densities)
    if len(order) > get_budget('region_ub_max_regions'):
        logger.warning(f"Region belief with {len(order)} regions: greedy maximum-density search")
        chosen = [order[0]]
        current = b.regions[order[0]]
        for idx in order[1:]:
            candidate = intersect(current, b.regions[idx])
            if is_solid(candidate):
                chosen.append(idx)
                current = candidate
        return current, chosen

    best: Dict[str, object] = {'weight': -np.inf, 'set': [], 'poly': None}
    suffix = np.concatenate([np.cumsum(densities[order][::-1])[::-1], [0.0]])

    def search(pos: int, chosen: List[int], current: Optional[Polytope], weight: float):
        if weight > best['weight']:
            best.update(weight=weight, set=list(chosen), poly=current)
        if pos == len(order) or weight + suffix[pos] <= best['weight']:
            return
        idx = order[pos]
        candidate = b.regions[idx] if current is None else intersect(current, b.regions[idx])
        if current is None or (boxes_overlap(region_box(current), region_box(b.regions[idx]))
                               and is_solid(candidate)):
            chosen.append(idx)
            search(pos + 1, chosen, candidate, weight + densities[idx])
            chosen.pop()
        search(pos + 1, chosen, current, weight)

    search(0, [], None, 0.0)
    return best['poly'], best['set']


def _overlap_mass(stored: RegionBelief, target: Polytope) -> float:
    box = region_box(target)
    total = 0.0
    for region, density in zip(stored.regions, stored.densities):
        if boxes_overlap(region_box(region), box):
            total += density * volume(intersect(region, target))
    return total


def ub_value_region(upper: UpperBoundSet, b: RegionBelief) -> float:
    """min sum(lambda_k y_k) + (U - L) c with c >= 1 - sum(lambda_k * mass of b_k on the densest overlap)."""
    entries = _matching(upper, b)
    bounds = upper.bounds
    if not entries:
        return bounds.U
    densest, _ = max_density_region(b)
    y = np.array([e.value for e in entries])
    overlap = np.array([_overlap_mass(e.belief, densest) for e in entries])
    penalty = bounds.U - bounds.L
    single = y + penalty * np.maximum(0.0, 1.0 - overlap)
    best_vertex = float(np.min(single))
    if len(entries) == 1:
        return best_vertex
    value = _solve_interpolation(y, penalty, [(np.concatenate([overlap, [1.0]]), linprog.GE, 1.0)])
    if value is None:
        return best_vertex
    return min(value, best_vertex)


def seed_values(upper: UpperBoundSet, beliefs: Sequence[Belief]) -> int:
    added = 0
    for b in beliefs:
        added += upper.add(b, upper.bounds.U)
    return added
