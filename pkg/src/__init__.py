from src.core import (
    load_settings,
    get_tolerances,
    get_budget,
    PROJECT_ROOT,
    get_logger,
    setup_logger,
    NsPomdpError,
    ConfigurationError,
    ModelError,
    BeliefError,
    BudgetExceededError,
)
from src.geometry import Polytope, AffineMap, Fcp
from src.models import AgentState, NsPomdpModel, ParticleBelief, RegionBelief, ReluNet
from src.models.catalog import build_model, resolve_model
from src.services import LowerBound, UpperBoundSet, SolveConfig, solve, LookaheadStrategy, finite_horizon_value

__all__ = [
    'load_settings',
    'get_tolerances',
    'get_budget',
    'PROJECT_ROOT',
    'get_logger',
    'setup_logger',
    'NsPomdpError',
    'ConfigurationError',
    'ModelError',
    'BeliefError',
    'BudgetExceededError',
    'Polytope',
    'AffineMap',
    'Fcp',
    'AgentState',
    'NsPomdpModel',
    'ParticleBelief',
    'RegionBelief',
    'ReluNet',
    'build_model',
    'resolve_model',
    'LowerBound',
    'UpperBoundSet',
    'SolveConfig',
    'solve',
    'LookaheadStrategy',
    'finite_horizon_value',
]
