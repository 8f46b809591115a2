import pandas as pd
import pytest

from src.geometry import parse_polygon_line
from src.models.belief import ParticleBelief
from src.models.nspomdp import AgentState
from src.services.backup import init_bounds, point_update
from src.services.exports import TRACE_COLUMNS, export_values, trace_frame, write_paths, write_trace
from src.services.hsvi import TraceRow
from src.services.strategy import LookaheadStrategy, simulate_runs

SPOT = AgentState(1, 15)


@pytest.fixture(scope='module')
def spot_bounds(carpark4):
    b = ParticleBelief.create(SPOT, [[2.5, 3.5]])
    lower, upper = init_bounds(carpark4, [b])
    point_update(carpark4, lower, upper, b)
    point_update(carpark4, lower, upper, b)
    return b, lower


def test_trace_csv(tmp_path):
    trace = [TraceRow(0, 0.0, 5000.0, 1, 1, 0.5), TraceRow(1, 1000.0, 4200.0, 2, 3, 1.25)]
    assert list(trace_frame(trace).columns) == TRACE_COLUMNS
    path = write_trace(trace, tmp_path / 'out' / 'trace.csv')
    frame = pd.read_csv(path)
    assert list(frame.columns) == TRACE_COLUMNS
    assert frame['ub'].tolist() == [5000.0, 4200.0]
    assert frame['upsilon_size'].tolist() == [1, 3]


def test_path_csv_and_summary(carpark4, spot_bounds, tmp_path):
    b, lower = spot_bounds
    records = simulate_runs(carpark4, LookaheadStrategy(carpark4, lower), b, runs=2, horizon=3, seed=0)
    path = write_paths(carpark4, records, tmp_path / 'paths.csv')

    frame = pd.read_csv(path)
    assert list(frame.columns) == ['run', 'step', 'loc', 'per', 'x', 'y', 'action', 'reward', 'return_so_far']
    assert len(frame) == 6
    assert frame['run'].tolist() == [0, 0, 0, 1, 1, 1]
    assert frame['step'].tolist() == [0, 1, 2, 0, 1, 2]
    assert frame['reward'].iloc[0] == 1000.0
    assert frame['return_so_far'].iloc[2] == pytest.approx(records[0].discounted_return)

    summary = pd.read_csv(tmp_path / 'paths_summary.csv')
    assert list(summary.columns) == ['run', 'return', 'compliance', 'mean_trust']
    assert summary['return'].tolist() == pytest.approx([r.discounted_return for r in records])


def test_value_dumps(carpark4, spot_bounds, tmp_path):
    _, lower = spot_bounds
    written = export_values(carpark4, list(lower), tmp_path, first=2)
    assert [p.name for p in written] == ['alpha_0.txt', 'alpha_1.txt', 'alpha_2.txt', 'max.txt']

    lines = (tmp_path / 'alpha_0.txt').read_text().splitlines()
    # the constant starting alpha has one piece per perception region
    assert len(lines) == 80
    for line in lines:
        label, points, value = parse_polygon_line(line)
        assert value == 0.0
        assert points.shape == (4, 2)

    best = [parse_polygon_line(line) for line in (tmp_path / 'max.txt').read_text().splitlines()]
    assert any(label == '1:15' and value == 1000.0 for label, _, value in best)
    assert min(value for _, _, value in best) == 0.0


def test_no_max_dump_by_default(carpark4, spot_bounds, tmp_path):
    _, lower = spot_bounds
    written = export_values(carpark4, list(lower)[:1], tmp_path)
    assert [p.name for p in written] == ['alpha_0.txt']
