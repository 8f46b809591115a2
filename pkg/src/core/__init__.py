from src.core.loader import (
    load_settings,
    get_tolerances,
    get_budget,
    get_thread_count,
    get_models_path,
    get_log_path,
    Tolerances,
    PROJECT_ROOT
)
from src.core.logger import get_logger, setup_logger, set_level
from src.core.exceptions import (
    NsPomdpError,
    ConfigurationError,
    GeometryError,
    DimensionMismatchError,
    UnboundedPolytopeError,
    EmptyPolytopeError,
    NonInvertibleMapError,
    LpError,
    NumericalInstabilityError,
    ModelError,
    ModelParseError,
    ModelValidationError,
    UnavailableActionError,
    PerceptCompatibilityError,
    PointOutsideDomainError,
    BeliefError,
    ZeroProbabilityObservationError,
    BudgetExceededError
)

__all__ = [
    'load_settings',
    'get_tolerances',
    'get_budget',
    'get_thread_count',
    'get_models_path',
    'get_log_path',
    'Tolerances',
    'PROJECT_ROOT',
    'get_logger',
    'setup_logger',
    'set_level',
    'NsPomdpError',
    'ConfigurationError',
    'GeometryError',
    'DimensionMismatchError',
    'UnboundedPolytopeError',
    'EmptyPolytopeError',
    'NonInvertibleMapError',
    'LpError',
    'NumericalInstabilityError',
    'ModelError',
    'ModelParseError',
    'ModelValidationError',
    'UnavailableActionError',
    'PerceptCompatibilityError',
    'PointOutsideDomainError',
    'BeliefError',
    'ZeroProbabilityObservationError',
    'BudgetExceededError',
]
