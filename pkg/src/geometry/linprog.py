"""Dense two-phase simplex.

Problems here are tiny (a few hundred variables at most), so the tableau is a
plain numpy array and pivoting follows Bland's rule to rule out cycling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import LpError, NumericalInstabilityError
from src.core.loader import get_tolerances

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'

LE = '<='
EQ = '='
GE = '>='

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-10

Constraint = Tuple[Sequence[float], str, float]
Bound = Tuple[Optional[float], Optional[float]]


@dataclass(frozen=True)
class LinearProgram:
    objective: np.ndarray
    constraints: List[Constraint] = field(default_factory=list)
    sense: str = 'min'
    bounds: Optional[List[Bound]] = None

    def __post_init__(self):
        n = len(self.objective)
        if n < 1:
            raise LpError("Linear program needs at least one variable")
        if self.sense not in ('min', 'max'):
            raise LpError(f"Unknown sense: {self.sense}")
        for coeffs, relation, _ in self.constraints:
            if len(coeffs) != n:
                raise LpError(f"Constraint has {len(coeffs)} coefficients, expected {n}")
            if relation not in (LE, EQ, GE):
                raise LpError(f"Unknown relation: {relation}")
        if self.bounds is not None and len(self.bounds) != n:
            raise LpError(f"Got {len(self.bounds)} bounds for {n} variables")

    @property
    def n(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Optional[float] = None
    assignment: Optional[np.ndarray] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Substitution:
    """Maps original variables onto nonnegative tableau columns."""

    def __init__(self, bounds: List[Bound]):
        self.columns: List[List[Tuple[int, float]]] = []
        self.shift = np.zeros(len(bounds))
        self.upper_rows: List[Tuple[int, float]] = []
        col = 0
        for j, (lo, hi) in enumerate(bounds):
            lo_finite = lo is not None and np.isfinite(lo)
            hi_finite = hi is not None and np.isfinite(hi)
            if lo_finite:
                self.shift[j] = lo
                self.columns.append([(col, 1.0)])
                if hi_finite:
                    self.upper_rows.append((col, hi - lo))
                col += 1
            elif hi_finite:
                self.shift[j] = hi
                self.columns.append([(col, -1.0)])
                col += 1
            else:
                self.columns.append([(col, 1.0), (col + 1, -1.0)])
                col += 2
        self.width = col

    def row(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros(self.width)
        for j, parts in enumerate(self.columns):
            for c, sign in parts:
                out[c] += sign * coeffs[j]
        return out

    def recover(self, z: np.ndarray) -> np.ndarray:
        x = self.shift.copy()
        for j, parts in enumerate(self.columns):
            for c, sign in parts:
                x[j] += sign * z[c]
        return x


def _pivot(T: np.ndarray, row: int, col: int, limit: float):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    if not np.all(np.isfinite(T)) or np.max(np.abs(T)) > limit:
        raise NumericalInstabilityError("Simplex tableau entry exceeded the stability limit")


def _run_simplex(T: np.ndarray, basis: List[int], allowed: int, limit: float) -> str:
    """Minimise the cost row (last row) over columns [0, allowed)."""
    m = T.shape[0] - 1
    max_steps = 50 * (m + allowed) + 100
    for _ in range(max_steps):
        cost = T[-1, :allowed]
        entering = -1
        for j in range(allowed):
            if cost[j] < -_COST_TOL:
                entering = j
                break
        if entering < 0:
            return OPTIMAL

        column = T[:m, entering]
        rhs = T[:m, -1]
        best_row = -1
        best_ratio = np.inf
        for i in range(m):
            if column[i] > _PIVOT_TOL:
                ratio = rhs[i] / column[i]
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12 and basis[i] < basis[best_row]
                ):
                    best_ratio = ratio
                    best_row = i
        if best_row < 0:
            return UNBOUNDED

        _pivot(T, best_row, entering, limit)
        basis[best_row] = entering
    raise NumericalInstabilityError("Simplex did not converge within the step limit")


def solve(lp: LinearProgram) -> LpOutcome:
    tol = get_tolerances()
    limit = 1.0 / tol.eps_det

    bounds = lp.bounds if lp.bounds is not None else [(None, None)] * lp.n
    sub = _Substitution(bounds)

    rows: List[np.ndarray] = []
    rels: List[str] = []
    rhs: List[float] = []
    for coeffs, relation, value in lp.constraints:
        coeffs = np.asarray(coeffs, dtype=float)
        row = sub.row(coeffs)
        b = float(value) - float(coeffs @ sub.shift)
        if relation == EQ:
            rows.extend([row, row])
            rels.extend([LE, GE])
            rhs.extend([b, b])
        else:
            rows.append(row)
            rels.append(relation)
            rhs.append(b)
    for col, width in sub.upper_rows:
        row = np.zeros(sub.width)
        row[col] = 1.0
        rows.append(row)
        rels.append(LE)
        rhs.append(width)

    cost = sub.row(np.asarray(lp.objective, dtype=float))
    if lp.sense == 'max':
        cost = -cost

    m = len(rows)
    n = sub.width
    if m == 0:
        if np.any(np.abs(cost) > _COST_TOL):
            return LpOutcome(UNBOUNDED)
        x = sub.recover(np.zeros(n))
        return LpOutcome(OPTIMAL, float(np.asarray(lp.objective) @ x), x)

    # Flip rows so every right-hand side is nonnegative.
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = -rows[i]
            rhs[i] = -rhs[i]
            rels[i] = GE if rels[i] == LE else LE

    n_slack = m
    artificial_rows = [i for i in range(m) if rels[i] == GE]
    n_art = len(artificial_rows)
    width = n + n_slack + n_art

    T = np.zeros((m + 1, width + 1))
    basis: List[int] = []
    art_col = n + n_slack
    for i in range(m):
        T[i, :n] = rows[i]
        T[i, -1] = rhs[i]
        if rels[i] == LE:
            T[i, n + i] = 1.0
            basis.append(n + i)
        else:
            T[i, n + i] = -1.0
            T[i, art_col] = 1.0
            basis.append(art_col)
            art_col += 1

    if n_art:
        T[-1, n + n_slack:width] = 1.0
        for i in artificial_rows:
            T[-1] -= T[i]
        _run_simplex(T, basis, width, limit)
        if -T[-1, -1] > tol.eps_lp:
            return LpOutcome(INFEASIBLE)

        # Drive artificial columns out of the basis; drop redundant rows.
        keep = []
        for i in range(m):
            if basis[i] >= n + n_slack:
                candidates = np.nonzero(np.abs(T[i, :n + n_slack]) > _PIVOT_TOL)[0]
                if len(candidates) == 0:
                    continue
                _pivot(T, i, int(candidates[0]), limit)
                basis[i] = int(candidates[0])
            keep.append(i)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]
        T = np.hstack([T[:, :n + n_slack], T[:, -1:]])

    # Phase 2 cost row.
    full_cost = np.zeros(T.shape[1])
    full_cost[:n] = cost
    T[-1] = full_cost
    for i, bcol in enumerate(basis):
        if full_cost[bcol] != 0.0:
            T[-1] -= full_cost[bcol] * T[i]

    status = _run_simplex(T, basis, n + n_slack, limit)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED)

    z = np.zeros(n + n_slack)
    for i, bcol in enumerate(basis):
        z[bcol] = T[i, -1]
    x = sub.recover(z[:n])
    value = float(np.asarray(lp.objective, dtype=float) @ x)
    return LpOutcome(OPTIMAL, value, x)


def feasible(constraints: List[Constraint], dim: Optional[int] = None) -> bool:
    if not constraints and dim is None:
        return True
    n = dim if dim is not None else len(constraints[0][0])
    lp = LinearProgram(objective=np.zeros(n), constraints=constraints)
    return solve(lp).status != INFEASIBLE


def halfspace_constraints(A: np.ndarray, b: np.ndarray) -> List[Constraint]:
    return [(A[i], LE, float(b[i])) for i in range(A.shape[0])]


def chebyshev_center(A: np.ndarray, b: np.ndarray) -> Tuple[Optional[np.ndarray], float]:
    """Largest inscribed ball of {x : Ax <= b}; rows of A are unit normals.

    Returns (None, -inf) for an infeasible system. The radius is capped at
    1e6 so unbounded inputs still yield a point.
    """
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    constraints: List[Constraint] = [
        (np.append(A[i], norms[i]), LE, float(b[i])) for i in range(A.shape[0])
    ]
    objective = np.zeros(n + 1)
    objective[-1] = 1.0
    bounds: List[Bound] = [(None, None)] * n + [(0.0, 1e6)]
    outcome = solve(LinearProgram(objective, constraints, 'max', bounds))
    if not outcome.optimal:
        return None, -np.inf
    return outcome.assignment[:n], float(outcome.assignment[-1])
