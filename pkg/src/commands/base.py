from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict

from src.core.exceptions import ConfigurationError
from src.models.belief import Belief
from src.models.catalog import resolve_model
from src.models.nspomdp import NsPomdpModel
from src.parser.belief_file import BeliefParser
from src.parser.helper import load_json

OK = 0
VALIDATION = 2
BUDGET = 3
NUMERICAL = 4
CONFIGURATION = 5
FAILURE = 1


@dataclass
class CommandResult:
    text: str
    data: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = OK


def load_model_arg(value: str) -> NsPomdpModel:
    return resolve_model(value)


def load_belief_arg(model: NsPomdpModel, value: str) -> Belief:
    """A belief literal file, or the literal itself when the argument starts with '{'."""
    parser = BeliefParser(model)
    if value.lstrip().startswith('{'):
        return parser.parse_obj(load_json(value, 'belief literal'))
    path = Path(value)
    if not path.is_file():
        raise ConfigurationError(f"Belief file not found: {value}")
    return parser.parse_file(path)
