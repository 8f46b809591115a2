"""Particle and region beliefs over the environment, with closed-form updates."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Protocol, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import BeliefError, PerceptCompatibilityError, ZeroProbabilityObservationError
from src.core.loader import get_tolerances
from src.geometry import (
    Polytope,
    affine_image,
    boxes_overlap,
    contains,
    intersect,
    is_solid,
    region_box,
    remove_redundant,
    volume
)
from src.models.nspomdp import AgentState, NsPomdpModel
from src.models.perception import region_in_percept

PARTICLES = 'particles'
REGION = 'region'


class PwcFunction(Protocol):
    def pieces(self, agent_state) -> Sequence[Tuple[Polytope, float]]:
        ...

    def value(self, agent_state, x) -> float:
        ...


def _round_key(values: np.ndarray) -> tuple:
    step = get_tolerances().particle_round
    return tuple(int(v) for v in np.round(np.asarray(values, dtype=float).reshape(-1) / step))


@dataclass(frozen=True, eq=False)
class ParticleBelief:
    agent_state: AgentState
    points: np.ndarray
    weights: np.ndarray
    kind = PARTICLES

    @classmethod
    def create(cls, agent_state, points, weights=None) -> 'ParticleBelief':
        """Normalised belief; coincident points are merged by summing weights."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if weights is None:
            weights = np.full(len(points), 1.0 / len(points))
        weights = np.asarray(weights, dtype=float)
        if len(points) == 0 or len(weights) != len(points):
            raise BeliefError(f"{len(points)} particles with {len(weights)} weights")
        if np.any(weights <= 0):
            raise BeliefError("Particle weights must be positive")
        eps = get_tolerances().eps_num
        merged_pts: List[np.ndarray] = []
        merged_w: List[float] = []
        for point, weight in zip(points, weights):
            for idx, other in enumerate(merged_pts):
                if np.linalg.norm(point - other) <= eps:
                    merged_w[idx] += weight
                    break
            else:
                merged_pts.append(point)
                merged_w.append(float(weight))
        w = np.array(merged_w)
        w = w / w.sum()
        pts = np.array(merged_pts)
        pts.setflags(write=False)
        w.setflags(write=False)
        return cls(AgentState(*agent_state), pts, w)

    @property
    def size(self) -> int:
        return len(self.weights)

    @cached_property
    def key(self) -> tuple:
        order = np.lexsort(self.points.T[::-1])
        return (PARTICLES, self.agent_state,
                tuple(_round_key(self.points[i]) for i in order),
                tuple(_round_key(self.weights[order])))

    @cached_property
    def mass_table(self) -> Dict[tuple, float]:
        """P(s_E; b) by canonical point: the summed weight of coincident particles."""
        table: Dict[tuple, float] = {}
        for point, weight in zip(self.points, self.weights):
            k = _round_key(point)
            table[k] = table.get(k, 0.0) + float(weight)
        return table

    def mass_at(self, x) -> float:
        return self.mass_table.get(_round_key(x), 0.0)


@dataclass(frozen=True, eq=False)
class RegionBelief:
    agent_state: AgentState
    regions: Tuple[Polytope, ...]
    densities: np.ndarray
    kind = REGION

    @classmethod
    def create(cls, agent_state, regions: Sequence[Polytope], densities=None) -> 'RegionBelief':
        """Densities are rescaled so that the total mass is one; omitted densities mean uniform."""
        regions = tuple(regions)
        if not regions:
            raise BeliefError("Region belief needs at least one region")
        vols = np.array([volume(r) for r in regions])
        if np.any(vols <= get_tolerances().eps_vol):
            raise BeliefError("Region belief contains a degenerate region")
        if densities is None:
            densities = np.ones(len(regions))
        densities = np.asarray(densities, dtype=float)
        if len(densities) != len(regions) or np.any(densities <= 0):
            raise BeliefError("Region densities must be positive, one per region")
        densities = densities / float(densities @ vols)
        densities.setflags(write=False)
        return cls(AgentState(*agent_state), regions, densities)

    @property
    def size(self) -> int:
        return len(self.regions)

    @cached_property
    def volumes(self) -> np.ndarray:
        return np.array([volume(r) for r in self.regions])

    @cached_property
    def key(self) -> tuple:
        parts = []
        for region, density in zip(self.regions, self.densities):
            rows = tuple(sorted(_round_key(np.append(region.A[i], region.b[i])) for i in range(len(region))))
            parts.append((rows, _round_key([density])))
        return (REGION, self.agent_state, tuple(sorted(parts)))

    def masses(self) -> np.ndarray:
        return self.densities * self.volumes


Belief = Union[ParticleBelief, RegionBelief]


@dataclass(frozen=True, eq=False)
class Branch:
    """One observation outcome of a belief under an action."""
    agent_state: AgentState
    probability: float
    belief: Belief


def check_compatible(model: NsPomdpModel, b: Belief):
    loc, per = b.agent_state
    if isinstance(b, ParticleBelief):
        for point in b.points:
            if model.observe(loc, point) != per:
                raise PerceptCompatibilityError(
                    f"Particle {point.tolist()} is not compatible with agent state {b.agent_state}")
    else:
        for region in b.regions:
            if not region_in_percept(model.perception, loc, per, region):
                raise PerceptCompatibilityError(f"A region is not contained in S_E of agent state {b.agent_state}")


def branches(model: NsPomdpModel, b: Belief, action) -> List[Branch]:
    """All positive-probability observations with updated beliefs, in agent-state order."""
    model.check_action(b.agent_state, action)
    if isinstance(b, ParticleBelief):
        out = _particle_branches(model, b, action)
    else:
        out = _region_branches(model, b, action)
    return sorted(out, key=lambda br: model.agent_state_index(br.agent_state))


def _particle_branches(model: NsPomdpModel, b: ParticleBelief, action) -> List[Branch]:
    joint: Dict[AgentState, Tuple[List[np.ndarray], List[float]]] = {}
    dyn = model.env_dyn[action]
    images = [dyn.step(point) for point in b.points]
    for loc, p_loc in model.agent_successors(b.agent_state, action):
        for weight, outcomes in zip(b.weights, images):
            for x_next, mu in outcomes:
                state = AgentState(loc, model.observe(loc, x_next))
                pts, ws = joint.setdefault(state, ([], []))
                pts.append(x_next)
                ws.append(p_loc * weight * mu)
    out = []
    for state, (pts, ws) in joint.items():
        prob = float(sum(ws))
        if prob <= 0.0:
            continue
        out.append(Branch(state, prob, ParticleBelief.create(state, pts, ws)))
    return out


def _region_branches(model: NsPomdpModel, b: RegionBelief, action) -> List[Branch]:
    eps_vol = get_tolerances().eps_vol
    joint: Dict[AgentState, Tuple[List[Polytope], List[float], List[float]]] = {}
    dyn = model.env_dyn[action]
    for loc, p_loc in model.agent_successors(b.agent_state, action):
        cells = model.env_partition(loc).regions
        for region, density in zip(b.regions, b.densities):
            for comp in dyn.components:
                for piece in comp.pieces:
                    source = intersect(region, piece.guard)
                    if not is_solid(source):
                        continue
                    image = remove_redundant(affine_image(source, piece.map))
                    new_density = density * comp.weight / abs(piece.map.det)
                    image_box = region_box(image)
                    for cell, per in cells:
                        if not boxes_overlap(image_box, region_box(cell)):
                            continue
                        fragment = intersect(image, cell)
                        frag_volume = volume(fragment)
                        if frag_volume <= eps_vol:
                            continue
                        state = AgentState(loc, per)
                        polys, dens, masses = joint.setdefault(state, ([], [], []))
                        polys.append(remove_redundant(fragment))
                        dens.append(new_density)
                        masses.append(p_loc * new_density * frag_volume)
    out = []
    for state, (polys, dens, masses) in joint.items():
        prob = float(sum(masses))
        if prob <= 0.0:
            continue
        out.append(Branch(state, prob, RegionBelief.create(state, polys, dens)))
    return out


def obs_prob(model: NsPomdpModel, b: Belief, action, next_state) -> float:
    next_state = AgentState(*next_state)
    for branch in branches(model, b, action):
        if branch.agent_state == next_state:
            return branch.probability
    return 0.0


def update(model: NsPomdpModel, b: Belief, action, next_state) -> Belief:
    next_state = AgentState(*next_state)
    for branch in branches(model, b, action):
        if branch.agent_state == next_state:
            return branch.belief
    raise ZeroProbabilityObservationError(
        f"Observation {next_state} has probability zero after action {action!r} from {b.agent_state}")


def particle_update(model: NsPomdpModel, b: ParticleBelief, action, next_state) -> ParticleBelief:
    if not isinstance(b, ParticleBelief):
        raise BeliefError("particle_update needs a particle belief")
    return update(model, b, action, next_state)


def region_update(model: NsPomdpModel, b: RegionBelief, action, next_state) -> RegionBelief:
    if not isinstance(b, RegionBelief):
        raise BeliefError("region_update needs a region belief")
    return update(model, b, action, next_state)


def expect_pwc(f: PwcFunction, b: Belief) -> float:
    if isinstance(b, ParticleBelief):
        return float(sum(w * f.value(b.agent_state, x) for x, w in zip(b.points, b.weights)))
    total = 0.0
    pieces = f.pieces(b.agent_state)
    for region, density in zip(b.regions, b.densities):
        box = region_box(region)
        for poly, value in pieces:
            if value == 0.0 or not boxes_overlap(box, region_box(poly)):
                continue
            total += value * density * volume(intersect(region, poly))
    return float(total)


def support_mass(b: Belief, poly: Polytope) -> float:
    """Belief mass inside poly."""
    if isinstance(b, ParticleBelief):
        return float(sum(w for x, w in zip(b.points, b.weights) if contains(poly, x)))
    box = region_box(poly)
    return float(sum(d * volume(intersect(r, poly))
                     for r, d in zip(b.regions, b.densities) if boxes_overlap(region_box(r), box)))


def mixture(b1: ParticleBelief, b2: ParticleBelief, lam: float) -> ParticleBelief:
    """lam * b1 + (1 - lam) * b2 on the union of their particles."""
    if b1.agent_state != b2.agent_state:
        raise BeliefError("Cannot mix beliefs of different agent states")
    points = np.vstack([b1.points, b2.points])
    weights = np.concatenate([lam * b1.weights, (1.0 - lam) * b2.weights])
    keep = weights > 0
    return ParticleBelief.create(b1.agent_state, points[keep], weights[keep])
