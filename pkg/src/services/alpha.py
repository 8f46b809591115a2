"""PWC alpha-functions and the lower bound they induce."""
from __future__ import annotations

from itertools import count
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.geometry import Fcp, Polytope, contains
from src.models.belief import Belief, expect_pwc
from src.models.nspomdp import AgentState

_uids = count()


class AlphaFunction:
    """Constant pieces per agent state; states without pieces take the default value."""

    __slots__ = ('regions', 'default', 'domain', 'uid')

    def __init__(self, regions: Dict[AgentState, Sequence[Tuple[Polytope, float]]], default: float,
                 domain: Polytope):
        self.regions: Dict[AgentState, List[Tuple[Polytope, float]]] = {
            AgentState(*state): [(poly, float(value)) for poly, value in pieces]
            for state, pieces in regions.items()
        }
        self.default = float(default)
        self.domain = domain
        self.uid = next(_uids)

    @classmethod
    def constant(cls, domain: Polytope, value: float) -> 'AlphaFunction':
        return cls({}, value, domain)

    def __repr__(self) -> str:
        pieces = sum(len(p) for p in self.regions.values())
        return f"AlphaFunction(uid={self.uid}, states={len(self.regions)}, pieces={pieces}, default={self.default})"

    def pieces(self, agent_state) -> List[Tuple[Polytope, float]]:
        found = self.regions.get(AgentState(*agent_state))
        if found is None:
            return [(self.domain, self.default)]
        return found

    def value(self, agent_state, x) -> float:
        found = self.regions.get(AgentState(*agent_state))
        if found is None:
            return self.default
        for poly, value in found:
            if contains(poly, x):
                return value
        return self.default

    def as_fcp(self, agent_state) -> Fcp:
        return Fcp(self.pieces(agent_state), self.domain.dim)

    def values(self) -> Iterator[float]:
        yield self.default
        for pieces in self.regions.values():
            for _, value in pieces:
                yield value

    def clamp(self, low: float, high: float) -> 'AlphaFunction':
        return AlphaFunction(
            {s: [(poly, min(max(v, low), high)) for poly, v in pieces] for s, pieces in self.regions.items()},
            min(max(self.default, low), high),
            self.domain,
        )


class LowerBound:
    """Gamma: the max over alpha-functions of their expectation.

    Gamma only grows, so a cached maximum for a belief is extended with the
    alphas added since it was computed.
    """

    def __init__(self, alphas: Optional[Sequence[AlphaFunction]] = None):
        self.alphas: List[AlphaFunction] = list(alphas or [])
        self._best: Dict[tuple, Tuple[int, float, int]] = {}

    def __len__(self) -> int:
        return len(self.alphas)

    def __getitem__(self, idx: int) -> AlphaFunction:
        return self.alphas[idx]

    def __iter__(self) -> Iterator[AlphaFunction]:
        return iter(self.alphas)

    @property
    def version(self) -> int:
        return len(self.alphas)

    def add(self, alpha: AlphaFunction) -> int:
        self.alphas.append(alpha)
        return len(self.alphas) - 1

    def value(self, b: Belief) -> Tuple[float, int]:
        """Largest expectation and the lowest index attaining it."""
        seen, best, best_idx = self._best.get(b.key, (0, -np.inf, -1))
        for idx in range(seen, len(self.alphas)):
            value = expect_pwc(self.alphas[idx], b)
            if value > best:
                best, best_idx = value, idx
        self._best[b.key] = (len(self.alphas), best, best_idx)
        return best, best_idx


def lb_value(lower: LowerBound, b: Belief) -> Tuple[float, int]:
    return lower.value(b)
