"""Perception: explicit percept partitions or one-hidden-layer ReLU classifiers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import (
    BudgetExceededError,
    ModelError,
    PointOutsideDomainError,
    UnboundedPolytopeError
)
from src.core.loader import get_budget, get_tolerances
from src.core.logger import get_logger
from src.geometry import Fcp, Polytope, contains, intersect, is_bounded, is_solid, remove_redundant, volume
from src.utils.pool import run_ordered

logger = get_logger(__name__)

Label = Hashable


@dataclass(frozen=True, eq=False)
class ReluNet:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    labels: Tuple[Label, ...]

    def __post_init__(self):
        W1 = np.atleast_2d(np.asarray(self.W1, dtype=float))
        b1 = np.asarray(self.b1, dtype=float).reshape(-1)
        W2 = np.atleast_2d(np.asarray(self.W2, dtype=float))
        b2 = np.asarray(self.b2, dtype=float).reshape(-1)
        labels = tuple(self.labels)
        if W1.shape[0] != b1.shape[0] or W2.shape[1] != W1.shape[0] or W2.shape[0] != b2.shape[0]:
            raise ModelError(f"Inconsistent network shapes W1{W1.shape} b1{b1.shape} W2{W2.shape} b2{b2.shape}")
        if len(labels) != W2.shape[0]:
            raise ModelError(f"{len(labels)} labels for {W2.shape[0]} output classes")
        if W2.shape[0] < 2:
            raise ModelError("A classifier needs at least two classes")
        for name, arr in (('W1', W1), ('b1', b1), ('W2', W2), ('b2', b2)):
            if not np.all(np.isfinite(arr)):
                raise ModelError(f"Non-finite weights in {name}")
        object.__setattr__(self, 'W1', W1)
        object.__setattr__(self, 'b1', b1)
        object.__setattr__(self, 'W2', W2)
        object.__setattr__(self, 'b2', b2)
        object.__setattr__(self, 'labels', labels)

    @property
    def e(self) -> int:
        return self.W1.shape[1]

    @property
    def h(self) -> int:
        return self.W1.shape[0]

    @property
    def k(self) -> int:
        return self.W2.shape[0]

    def forward(self, x) -> np.ndarray:
        hidden = np.maximum(0.0, self.W1 @ np.asarray(x, dtype=float) + self.b1)
        return self.W2 @ hidden + self.b2

    def classify(self, x) -> Label:
        scores = self.forward(x)
        best = np.max(scores)
        tied = [i for i in range(self.k) if scores[i] >= best - get_tolerances().eps_num]
        return min((self.labels[i] for i in tied), key=_label_key)


def _label_key(label):
    return (0, label) if isinstance(label, (int, float)) else (1, str(label))


def _activation_cells(net: ReluNet, domain: Polytope, prefix: Tuple[int, ...]):
    """Depth-first enumeration of activation patterns extending prefix."""
    A = [domain.A]
    b = [domain.b]
    for unit, active in enumerate(prefix):
        row, off = _unit_constraint(net, unit, active)
        A.append(row[None, :])
        b.append(np.array([off]))
    root = Polytope(np.vstack(A), np.concatenate(b), bounded=True)
    if not is_solid(root):
        return []

    cells = []
    stack = [(prefix, root)]
    while stack:
        pattern, cell = stack.pop()
        unit = len(pattern)
        if unit == net.h:
            cells.append((pattern, cell))
            continue
        forced = _forced_state(net, unit)
        options = [forced] if forced is not None else [1, 0]
        # push in reverse so inactive patterns come out first
        for active in options:
            if forced is None:
                row, off = _unit_constraint(net, unit, active)
                child = Polytope(np.vstack([cell.A, row]), np.append(cell.b, off), bounded=True)
                if not is_solid(child):
                    continue
                child = remove_redundant(child)
            else:
                child = cell
            stack.append((pattern + (active,), child))
    cells.sort(key=lambda item: item[0])
    return cells


def _forced_state(net: ReluNet, unit: int) -> Optional[int]:
    if np.linalg.norm(net.W1[unit]) > 0:
        return None
    return 1 if net.b1[unit] > 0 else 0


def _unit_constraint(net: ReluNet, unit: int, active: int):
    # active: W1 x + b1 >= 0 ; inactive: W1 x + b1 <= 0
    if active:
        return -net.W1[unit], float(net.b1[unit])
    return net.W1[unit], float(-net.b1[unit])


def _class_regions(net: ReluNet, pattern: Tuple[int, ...], cell: Polytope) -> List[Tuple[Polytope, Label]]:
    mask = np.array(pattern, dtype=float)
    G = net.W2 @ (mask[:, None] * net.W1)
    g = net.W2 @ (mask * net.b1) + net.b2
    order = sorted(range(net.k), key=lambda i: _label_key(net.labels[i]))
    out = []
    for pos, c in enumerate(order):
        # a larger label whose score coincides with a smaller one owns nothing
        shadowed = any(np.allclose(G[c], G[o]) and abs(g[c] - g[o]) <= 1e-12 for o in order[:pos])
        if shadowed:
            continue
        rows = [cell.A]
        offs = [cell.b]
        for other in range(net.k):
            if other == c:
                continue
            rows.append((G[other] - G[c])[None, :])
            offs.append(np.array([g[c] - g[other]]))
        region = Polytope(np.vstack(rows), np.concatenate(offs), bounded=True)
        if is_solid(region):
            out.append((remove_redundant(region), net.labels[c]))
    return out


def enumerate_preimage(net: ReluNet, domain: Polytope) -> Fcp:
    budget = get_budget('preimage_max_hidden')
    if net.h > budget:
        raise BudgetExceededError(f"Hidden width {net.h} exceeds the preimage budget {budget}")
    if not is_bounded(domain):
        raise UnboundedPolytopeError("Preimage enumeration needs a bounded domain")
    if domain.dim != net.e:
        raise ModelError(f"Network input dimension {net.e} does not match domain dimension {domain.dim}")

    depth = min(3, net.h)
    prefixes = [tuple((idx >> (depth - 1 - bit)) & 1 for bit in range(depth)) for idx in range(2 ** depth)]
    prefixes = [p for p in prefixes if all(
        _forced_state(net, u) in (None, p[u]) for u in range(depth))]
    batches = run_ordered(lambda prefix: _activation_cells(net, domain, prefix), prefixes)

    regions: List[Tuple[Polytope, Label]] = []
    cell_count = 0
    for cells in batches:
        for pattern, cell in cells:
            cell_count += 1
            regions.extend(_class_regions(net, pattern, cell))
    logger.info(f"Preimage: {cell_count} activation cells, {len(regions)} labelled regions")
    return Fcp(regions, domain.dim)


Percepts = Union[Fcp, ReluNet]


@dataclass(eq=False)
class PerceptionSpec:
    domain: Polytope
    default: Optional[Percepts] = None
    per_loc: Dict[Label, Percepts] = field(default_factory=dict)
    _partitions: Dict[int, Fcp] = field(default_factory=dict, repr=False)

    def source(self, loc: Label) -> Percepts:
        src = self.per_loc.get(loc, self.default)
        if src is None:
            raise ModelError(f"No perception defined for location {loc!r}")
        return src

    def env_partition(self, loc: Label) -> Fcp:
        """Percept partition of the domain for loc (networks are enumerated once and cached)."""
        src = self.source(loc)
        key = id(src)
        if key not in self._partitions:
            if isinstance(src, ReluNet):
                self._partitions[key] = enumerate_preimage(src, self.domain)
            else:
                self._partitions[key] = src
        return self._partitions[key]

    def observe(self, loc: Label, x) -> Label:
        if not contains(self.domain, x):
            raise PointOutsideDomainError(f"Point {np.asarray(x).tolist()} is outside the environment domain")
        src = self.source(loc)
        if isinstance(src, ReluNet):
            return src.classify(x)
        idx = src.locate(x)
        if idx is None:
            idx = src.nearest(x)
        return src.regions[idx][1]

    def cells(self, loc: Label, per: Label) -> List[Polytope]:
        """S_E restricted to the agent state (loc, per), as convex pieces."""
        return [poly for poly, label in self.env_partition(loc).regions if label == per]

    def percepts(self, loc: Label) -> List[Label]:
        seen = []
        for _, label in self.env_partition(loc).regions:
            if label not in seen:
                seen.append(label)
        return seen


@dataclass(frozen=True)
class PerceptionFcp:
    """Perception partition lifted to S: every region carries its agent state."""
    regions: Tuple[Tuple[Tuple[Label, Label], Polytope], ...]

    def __len__(self) -> int:
        return len(self.regions)

    def for_state(self, agent_state) -> List[Polytope]:
        return [poly for state, poly in self.regions if state == agent_state]

    def agent_states(self) -> List[Tuple[Label, Label]]:
        seen = []
        for state, _ in self.regions:
            if state not in seen:
                seen.append(state)
        return seen


def perception_fcp(spec: PerceptionSpec, agent_states: Sequence[Tuple[Label, Label]]) -> PerceptionFcp:
    regions = []
    for state in agent_states:
        loc, per = state
        for poly in spec.cells(loc, per):
            regions.append((state, poly))
    return PerceptionFcp(tuple(regions))


def region_in_percept(spec: PerceptionSpec, loc: Label, per: Label, region: Polytope) -> bool:
    """True when region lies inside S_E for (loc, per) up to measure zero."""
    total = volume(region)
    inside = sum(volume(intersect(region, cell)) for cell in spec.cells(loc, per))
    return abs(total - inside) <= 1e-9 * max(1.0, total)
