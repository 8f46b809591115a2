"""Saving and loading solved bounds.

A bounds directory holds index.json plus gamma.jsonl and upsilon.jsonl. Both
line files open with the header line and then carry one JSON object per line.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Tuple, Union

from src.core.exceptions import ConfigurationError, ModelParseError
from src.core.logger import get_logger
from src.models.nspomdp import AgentState, GlobalBounds, NsPomdpModel
from src.parser.belief_file import BeliefParser
from src.parser.helper import from_label, polytope_rows, to_label, to_polytope
from src.services.alpha import AlphaFunction, LowerBound
from src.services.upper import UpperBoundSet

logger = get_logger(__name__)

HEADER = 'nspomdp-bounds v1'
INDEX_FILE = 'index.json'
GAMMA_FILE = 'gamma.jsonl'
UPSILON_FILE = 'upsilon.jsonl'


def alpha_to_obj(alpha: AlphaFunction) -> dict:
    pieces = []
    for state, regions in alpha.regions.items():
        for poly, value in regions:
            pieces.append([[from_label(state.loc), from_label(state.per)], polytope_rows(poly), value])
    return {'default': alpha.default, 'pieces': pieces}


def alpha_from_obj(obj: dict, model: NsPomdpModel, where: str) -> AlphaFunction:
    issues = []
    regions = {}
    for idx, (state, rows, value) in enumerate(obj.get('pieces', [])):
        poly = to_polytope(rows, model.dim, f"{where}.pieces[{idx}]", issues)
        if poly is not None:
            regions.setdefault(AgentState(*to_label(state)), []).append((poly, float(value)))
    if issues:
        raise ModelParseError("; ".join(issues))
    return AlphaFunction(regions, float(obj['default']), model.domain)


def _write_lines(path: Path, objects):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(HEADER + '\n')
        for obj in objects:
            f.write(json.dumps(obj) + '\n')


def _read_lines(path: Path):
    if not path.exists():
        raise ConfigurationError(f"Bounds file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        header = f.readline().rstrip('\n')
        if header != HEADER:
            raise ModelParseError(f"{path.name}: expected header '{HEADER}', got '{header}'", line=1)
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise ModelParseError(f"{path.name}: {e.msg}", line=lineno, column=e.colno) from e


def save_bounds(directory: Union[str, Path], model: NsPomdpModel, lower: LowerBound, upper: UpperBoundSet) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    bounds = upper.bounds
    index = {
        'header': HEADER,
        'model': model.name,
        'L': bounds.L,
        'U': bounds.U,
        'R_LB': bounds.R_LB,
        'gamma': len(lower),
        'upsilon': len(upper),
    }
    (directory / INDEX_FILE).write_text(json.dumps(index, indent=1) + '\n', encoding='utf-8')
    _write_lines(directory / GAMMA_FILE, (alpha_to_obj(alpha) for alpha in lower))
    _write_lines(directory / UPSILON_FILE,
                 ({'belief': BeliefParser.to_obj(p.belief), 'value': p.value} for p in upper))
    logger.info(f"Saved {len(lower)} alpha-functions and {len(upper)} upper bound points to {directory}")
    return directory


def load_bounds(directory: Union[str, Path], model: NsPomdpModel) -> Tuple[LowerBound, UpperBoundSet]:
    directory = Path(directory)
    index_path = directory / INDEX_FILE
    if not index_path.exists():
        raise ConfigurationError(f"No bounds index in {directory}")
    index = json.loads(index_path.read_text(encoding='utf-8'))
    if index.get('header') != HEADER:
        raise ModelParseError(f"{INDEX_FILE}: unsupported bounds format {index.get('header')!r}")
    if index.get('model') != model.name:
        logger.warning(f"Bounds were saved for model {index.get('model')}, loading into {model.name}")

    lower = LowerBound([alpha_from_obj(obj, model, f"gamma[{i}]")
                        for i, obj in enumerate(_read_lines(directory / GAMMA_FILE))])
    upper = UpperBoundSet(GlobalBounds(index['L'], index['U'], index['R_LB']))
    parser = BeliefParser()
    for obj in _read_lines(directory / UPSILON_FILE):
        upper.add(parser.parse_obj(obj['belief']), obj['value'])
    if not len(lower):
        raise ModelParseError(f"{GAMMA_FILE}: no alpha-functions")
    logger.info(f"Loaded {len(lower)} alpha-functions and {len(upper)} upper bound points from {directory}")
    return lower, upper
