from src.services.alpha import AlphaFunction, LowerBound, lb_value
from src.services.upper import UpperBoundSet, UpperPoint, ub_value, ub_value_particle, ub_value_region
from src.services.backup import (
    Backup,
    PointUpdate,
    init_bounds,
    bellman_lb,
    bellman_ub,
    bval,
    ispp_backup,
    point_update,
    exact_vi_step
)
from src.services.hsvi import SolveConfig, SolveState, TraceRow, solve, explore, excess
from src.services.strategy import LookaheadStrategy, PathRecord, simulate, simulate_runs
from src.services.oracle import HorizonValue, finite_horizon_value
from src.services.persistence import save_bounds, load_bounds

__all__ = [
    'AlphaFunction',
    'LowerBound',
    'lb_value',
    'UpperBoundSet',
    'UpperPoint',
    'ub_value',
    'ub_value_particle',
    'ub_value_region',
    'Backup',
    'PointUpdate',
    'init_bounds',
    'bellman_lb',
    'bellman_ub',
    'bval',
    'ispp_backup',
    'point_update',
    'exact_vi_step',
    'SolveConfig',
    'SolveState',
    'TraceRow',
    'solve',
    'explore',
    'excess',
    'LookaheadStrategy',
    'PathRecord',
    'simulate',
    'simulate_runs',
    'HorizonValue',
    'finite_horizon_value',
    'save_bounds',
    'load_bounds',
]
