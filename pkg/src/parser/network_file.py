from pathlib import Path
from typing import Union

from src.core.exceptions import ModelError, ModelValidationError
from src.core.logger import get_logger
from src.models.perception import ReluNet
from src.parser.helper import dump_json, from_label, load_json, to_label

logger = get_logger(__name__)


class NetworkParser:
    """Weight files: {"e", "h", "W1", "b1", "W2", "b2", "labels"}, row-major doubles."""

    def parse_file(self, file_path: Union[str, Path]) -> ReluNet:
        text = Path(file_path).read_text(encoding='utf-8')
        net = self.parse_text(text)
        logger.info(f"Loaded network {file_path}: e={net.e}, h={net.h}, k={net.k}")
        return net

    def parse_text(self, text: str) -> ReluNet:
        return self.parse_obj(load_json(text, 'network file'))

    def parse_obj(self, obj: dict) -> ReluNet:
        issues = []
        for key in ('W1', 'b1', 'W2', 'b2', 'labels'):
            if key not in obj:
                issues.append(f"network: missing key '{key}'")
        if issues:
            raise ModelValidationError(issues)
        try:
            net = ReluNet(obj['W1'], obj['b1'], obj['W2'], obj['b2'], tuple(to_label(v) for v in obj['labels']))
        except (ModelError, ValueError, TypeError) as e:
            raise ModelValidationError([f"network: {e}"]) from e
        if 'e' in obj and int(obj['e']) != net.e:
            issues.append(f"network: declared e={obj['e']} but W1 has {net.e} columns")
        if 'h' in obj and int(obj['h']) != net.h:
            issues.append(f"network: declared h={obj['h']} but W1 has {net.h} rows")
        if issues:
            raise ModelValidationError(issues)
        return net

    @staticmethod
    def to_obj(net: ReluNet) -> dict:
        return {
            'e': net.e,
            'h': net.h,
            'W1': net.W1.tolist(),
            'b1': net.b1.tolist(),
            'W2': net.W2.tolist(),
            'b2': net.b2.tolist(),
            'labels': [from_label(v) for v in net.labels],
        }

    def dump(self, net: ReluNet) -> str:
        return dump_json(self.to_obj(net))
