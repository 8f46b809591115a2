"""Bundled models, built in code and written out as model files on demand."""
from __future__ import annotations

from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import ConfigurationError, ModelValidationError
from src.core.loader import get_models_path
from src.core.logger import get_logger
from src.geometry import AffineMap, Fcp, Polytope, difference
from src.models.nspomdp import AgentState, Component, EnvDynamics, NsPomdpModel, stay_pieces, validate_model
from src.models.perception import PerceptionSpec
from src.parser.model_file import ModelParser, dump_model

logger = get_logger(__name__)

GRID_MOVES = {
    'up': (0.0, 1.0),
    'down': (0.0, -1.0),
    'left': (-1.0, 0.0),
    'right': (1.0, 0.0),
    'park': (0.0, 0.0),
}
SPOT_REWARD = 1000.0


def grid_label(i: int, j: int, n: int) -> int:
    """Percept of grid cell (column i, row j), both 1-based."""
    return i + n * (j - 1)


def grid_cell(i: int, j: int) -> Polytope:
    return Polytope.box([i - 1, j - 1], [i, j])


def grid_suggestions(n: int, spot_columns: Tuple[int, int]) -> Dict[int, Tuple[str, ...]]:
    """Advisory table: head for the spot's columns, then along the top row."""
    lo, hi = spot_columns
    table = {}
    for j in range(1, n + 1):
        for i in range(1, n + 1):
            if j < n:
                if i < lo:
                    acts = ('up', 'right')
                elif i > hi:
                    acts = ('up', 'left')
                else:
                    acts = ('up',)
            else:
                if i < lo:
                    acts = ('right',)
                elif i > hi:
                    acts = ('left',)
                else:
                    acts = ('park',)
            table[grid_label(i, j, n)] = acts
    return table


def trust_row(trust: int, top: int, compliant: bool) -> Dict[int, float]:
    if compliant:
        return {min(trust + 1, top): 1.0}
    if trust == 1:
        return {1: 1.0}
    return {trust - 1: 0.5, trust: 0.5}


def grid_carpark(name: str, n: int, spot_cells: Sequence[Tuple[int, int]],
                 obstacles: Sequence[Tuple[int, int]] = (), penalty: float = -1000.0,
                 beta: float = 0.8, trust_levels: int = 5) -> NsPomdpModel:
    domain = Polytope.box([0.0, 0.0], [float(n), float(n)])
    locs = tuple(range(1, trust_levels + 1))
    pers = tuple(range(1, n * n + 1))
    actions = tuple(GRID_MOVES)

    cells = []
    rewards = []
    spot_labels = {grid_label(i, j, n) for i, j in spot_cells}
    obstacle_labels = {grid_label(i, j, n) for i, j in obstacles}
    for j in range(1, n + 1):
        for i in range(1, n + 1):
            label = grid_label(i, j, n)
            cells.append((grid_cell(i, j), label))
            if label in spot_labels:
                rewards.append((grid_cell(i, j), SPOT_REWARD))
            elif label in obstacle_labels:
                rewards.append((grid_cell(i, j), penalty))
            else:
                rewards.append((grid_cell(i, j), 0.0))
    perception = PerceptionSpec(domain, default=Fcp(cells, 2))

    moves = tuple(a for a in actions if a != 'park')
    available = {AgentState(tr, per): actions for tr in locs for per in spot_labels}

    columns = sorted(i for i, _ in spot_cells)
    suggested = grid_suggestions(n, (columns[0], columns[-1]))

    delta_A = {}
    for tr in locs:
        for per in pers:
            state = AgentState(tr, per)
            for action in available.get(state, moves):
                delta_A[(state, action)] = trust_row(tr, trust_levels, action in suggested[per])

    env_dyn = {
        action: EnvDynamics((Component(1.0, stay_pieces(domain, AffineMap.translation(move))),))
        for action, move in GRID_MOVES.items()
    }
    zero = Fcp.single(domain, 0.0)
    return NsPomdpModel(
        name=name,
        locs=locs,
        pers=pers,
        actions=actions,
        domain=domain,
        available_default=moves,
        available=available,
        delta_A=delta_A,
        env_dyn=env_dyn,
        perception=perception,
        reward_action={action: zero for action in actions},
        reward_state=Fcp(rewards, 2),
        beta=beta,
        suggested=suggested,
    )


VCAS_ACTIONS = {'level': 0.0, 'climb': 3.0, 'descend': -3.0}
VCAS_ACTION_COST = {'level': 0.0, 'climb': -10.0, 'descend': -10.0}


def toy3d_vcas_like(name: str = 'toy3d_vcas_like', beta: float = 0.9, dt: float = 1.0,
                    intruder_rate: float = 2.0, trust_levels: int = 4) -> NsPomdpModel:
    """Collision avoidance over (h, climb rate, time to separation loss) with slab advisories."""
    lo = np.array([-200.0, -10.0, 0.0])
    hi = np.array([200.0, 10.0, 5.0])
    domain = Polytope.box(lo, hi)
    locs = tuple(range(1, trust_levels + 1))
    # 1 clear of conflict, 2 descend, 3 climb
    pers = (1, 2, 3)
    actions = tuple(VCAS_ACTIONS)

    advisories = Fcp([
        (Polytope.box([lo[0], lo[1], 3.0], hi), 1),
        (Polytope.box([0.0, lo[1], lo[2]], [hi[0], hi[1], 3.0]), 2),
        (Polytope.box(lo, [0.0, hi[1], 3.0]), 3),
    ], 3)
    perception = PerceptionSpec(domain, default=advisories)
    suggested = {1: actions, 2: ('descend',), 3: ('climb',)}

    delta_A = {}
    for tr in locs:
        for per in pers:
            for action in actions:
                delta_A[(AgentState(tr, per), action)] = trust_row(tr, trust_levels, action in suggested[per])

    shear = np.array([[1.0, -dt, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    env_dyn = {}
    for action, accel in VCAS_ACTIONS.items():
        offset = np.array([dt * intruder_rate - 0.5 * dt * dt * accel, accel * dt, -dt])
        env_dyn[action] = EnvDynamics((Component(1.0, stay_pieces(domain, AffineMap(shear, offset))),))

    danger = Polytope.box([-50.0, lo[1], lo[2]], [50.0, hi[1], 1.0])
    reward_state = Fcp([(danger, -1000.0)] + [(piece, 0.0) for piece in difference(domain, danger)], 3)
    reward_action = {action: Fcp.single(domain, cost) for action, cost in VCAS_ACTION_COST.items()}

    return NsPomdpModel(
        name=name,
        locs=locs,
        pers=pers,
        actions=actions,
        domain=domain,
        available_default=actions,
        available={},
        delta_A=delta_A,
        env_dyn=env_dyn,
        perception=perception,
        reward_action=reward_action,
        reward_state=reward_state,
        beta=beta,
        suggested=suggested,
    )


BUNDLED: Dict[str, Callable[[], NsPomdpModel]] = {
    'carpark4_grid': lambda: grid_carpark('carpark4_grid', 4, [(3, 4)]),
    'carpark4_grid_obstacle': lambda: grid_carpark(
        'carpark4_grid_obstacle', 4, [(3, 4)], obstacles=[(2, 2)], penalty=-1000.0),
    'carpark4_grid_obstacle_5000': lambda: grid_carpark(
        'carpark4_grid_obstacle_5000', 4, [(3, 4)], obstacles=[(2, 2)], penalty=-5000.0),
    'carpark8_grid_obstacles': lambda: grid_carpark(
        'carpark8_grid_obstacles', 8, [(7, 8), (8, 8)],
        obstacles=[(3, 2), (5, 4), (2, 6), (7, 6)], penalty=-1000.0),
    'toy3d_vcas_like': toy3d_vcas_like,
}


def bundled_names() -> List[str]:
    return list(BUNDLED)


def build_model(name: str, validate: bool = True) -> NsPomdpModel:
    if name not in BUNDLED:
        raise ConfigurationError(f"Unknown bundled model: {name}")
    model = BUNDLED[name]()
    if validate:
        issues = validate_model(model)
        if issues:
            raise ModelValidationError(issues)
    return model


def resolve_model(name_or_path: Union[str, Path]) -> NsPomdpModel:
    """A model file path, a bundled model name, or a file of that name in the models directory."""
    path = Path(name_or_path)
    if path.is_file():
        return ModelParser().parse_file(path)
    name = str(name_or_path)
    stored = get_models_path() / f"{name}.json"
    if stored.is_file():
        return ModelParser().parse_file(stored)
    if name in BUNDLED:
        model = build_model(name)
        logger.info(f"Built bundled model {name}")
        return model
    raise ConfigurationError(f"No model file or bundled model named {name_or_path}")


def ensure_bundled_models(directory: Optional[Path] = None, names: Optional[Iterable[str]] = None) -> List[Path]:
    directory = Path(directory) if directory is not None else get_models_path()
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names or bundled_names():
        target = directory / f"{name}.json"
        if target.exists():
            continue
        target.write_text(dump_model(build_model(name, validate=False)), encoding='utf-8')
        logger.info(f"Wrote bundled model {name} to {target}")
        written.append(target)
    return written
