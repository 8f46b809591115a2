import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog as scipy_linprog

from src.core.exceptions import LpError
from src.geometry import linprog
from src.geometry.linprog import EQ, GE, LE, LinearProgram, chebyshev_center, feasible, solve


def test_simple_maximum():
    # max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0
    lp = LinearProgram(np.array([1.0, 1.0]), [([1, 2], LE, 4), ([3, 1], LE, 6)], 'max', [(0, None), (0, None)])
    outcome = solve(lp)
    assert outcome.optimal
    assert outcome.value == pytest.approx(2.8)
    assert outcome.assignment == pytest.approx([1.6, 1.2])


def test_infeasible():
    lp = LinearProgram(np.array([1.0]), [([1], LE, 1), ([1], GE, 2)])
    assert solve(lp).status == linprog.INFEASIBLE


def test_unbounded():
    lp = LinearProgram(np.array([1.0, 0.0]), [([0, 1], LE, 1)], 'max')
    assert solve(lp).status == linprog.UNBOUNDED


def test_equality_and_free_variables():
    # min x - y  s.t. x + y = 1, -3 <= x <= 3, y free but y <= 5
    lp = LinearProgram(np.array([1.0, -1.0]), [([1, 1], EQ, 1), ([0, 1], LE, 5)], 'min', [(-3, 3), (None, None)])
    outcome = solve(lp)
    assert outcome.optimal
    assert outcome.value == pytest.approx(-7.0)
    assert outcome.assignment == pytest.approx([-3.0, 4.0])


def test_degenerate_vertex_terminates():
    # several constraints tight at the optimum
    constraints = [([1, 0], LE, 1), ([0, 1], LE, 1), ([1, 1], LE, 2), ([1, -1], LE, 0), ([-1, 1], LE, 0)]
    outcome = solve(LinearProgram(np.array([1.0, 1.0]), constraints, 'max', [(0, None), (0, None)]))
    assert outcome.optimal
    assert outcome.value == pytest.approx(2.0)


def test_redundant_equalities():
    constraints = [([1, 1], EQ, 2), ([2, 2], EQ, 4)]
    outcome = solve(LinearProgram(np.array([1.0, 0.0]), constraints, 'min', [(0, None), (0, None)]))
    assert outcome.optimal
    assert outcome.value == pytest.approx(0.0)


def test_feasible():
    assert feasible([([1, 0], LE, 1), ([-1, 0], LE, 0)], 2)
    assert not feasible([([1, 0], LE, -1), ([-1, 0], LE, 0)], 2)


def test_chebyshev_center_of_square():
    A = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    b = np.array([2.0, 2.0, 0.0, 0.0])
    centre, radius = chebyshev_center(A, b)
    assert radius == pytest.approx(1.0)
    assert centre == pytest.approx([1.0, 1.0])


def test_chebyshev_center_infeasible():
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    b = np.array([-1.0, 0.0])
    centre, radius = chebyshev_center(A, b)
    assert centre is None
    assert radius == -np.inf


def test_rejects_malformed_program():
    with pytest.raises(LpError):
        LinearProgram(np.array([1.0, 1.0]), [([1], LE, 1)])
    with pytest.raises(LpError):
        LinearProgram(np.array([1.0]), [([1], '<', 1)])


coefficient = st.integers(min_value=-5, max_value=5)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.lists(coefficient, min_size=3, max_size=3), min_size=1, max_size=5),
    st.lists(st.integers(min_value=0, max_value=10), min_size=5, max_size=5),
    st.lists(coefficient, min_size=3, max_size=3),
)
def test_agrees_with_scipy_on_boxed_programs(rows, rhs, objective):
    A = np.array(rows, dtype=float)
    b = np.array(rhs[:len(rows)], dtype=float)
    c = np.array(objective, dtype=float)
    bounds = [(0.0, 3.0)] * 3
    # origin is feasible (b >= 0), the box keeps the optimum finite
    ours = solve(LinearProgram(c, [(A[i], LE, b[i]) for i in range(len(b))], 'min', bounds))
    ref = scipy_linprog(c, A_ub=A, b_ub=b, bounds=bounds, method='highs')
    assert ours.optimal
    assert ref.status == 0
    assert ours.value == pytest.approx(ref.fun, abs=1e-7)
    assert np.all(A @ ours.assignment <= b + 1e-7)
