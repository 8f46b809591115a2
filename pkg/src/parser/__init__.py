from src.parser.model_file import ModelParser, load_model, dump_model, model_to_obj
from src.parser.belief_file import BeliefParser
from src.parser.network_file import NetworkParser

__all__ = [
    'ModelParser',
    'BeliefParser',
    'NetworkParser',
    'load_model',
    'dump_model',
    'model_to_obj',
]
