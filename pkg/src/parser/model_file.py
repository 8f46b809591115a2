"""Model files: JSON documents describing an NS-POMDP.

Top-level keys: name, locs, pers, actions, domain, available, delta_A,
env_dynamics, perception, reward_action, reward_state, beta and the optional
suggested table. Polytopes are lists of [normal..., offset] rows.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from src.core.exceptions import DimensionMismatchError, ModelValidationError
from src.core.logger import get_logger
from src.geometry import AffineMap, Fcp, Polytope
from src.models.nspomdp import AgentState, Component, EnvDynamics, NsPomdpModel, Piece, validate_model
from src.models.perception import PerceptionSpec, ReluNet
from src.parser.helper import (
    dump_json,
    from_label,
    load_json,
    require,
    to_label,
    to_labels,
    to_number,
    to_polytope
)
from src.parser.network_file import NetworkParser

logger = get_logger(__name__)

REQUIRED_KEYS = (
    'locs', 'pers', 'actions', 'available', 'delta_A', 'env_dynamics',
    'perception', 'reward_action', 'reward_state', 'beta', 'domain'
)


class ModelParser:

    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = base_dir

    def parse_file(self, file_path: Union[str, Path]) -> NsPomdpModel:
        file_path = Path(file_path)
        self.base_dir = file_path.parent
        model = self.parse_text(file_path.read_text(encoding='utf-8'), default_name=file_path.stem)
        logger.info(f"Loaded model {model.name} from {file_path}")
        return model

    def parse_text(self, text: str, default_name: str = 'model') -> NsPomdpModel:
        obj = load_json(text, 'model file')
        model = self.build(obj, default_name)
        issues = validate_model(model)
        if issues:
            raise ModelValidationError(issues)
        return model

    def build(self, obj: Any, default_name: str = 'model') -> NsPomdpModel:
        issues: List[str] = []
        if not isinstance(obj, dict):
            raise ModelValidationError(["model file must contain a JSON object"])
        for key in REQUIRED_KEYS:
            if key not in obj:
                issues.append(f"missing key '{key}'")
        if issues:
            raise ModelValidationError(issues)

        locs = to_labels(obj['locs'], 'locs', issues)
        pers = to_labels(obj['pers'], 'pers', issues)
        actions = to_labels(obj['actions'], 'actions', issues)

        domain = to_polytope(obj['domain'], None, 'domain', issues)
        if domain is None:
            raise ModelValidationError(issues)
        dim = domain.dim

        available_default, available = self._available(obj['available'], issues)
        delta_A = self._delta_a(obj['delta_A'], issues)
        env_dyn = self._env_dynamics(obj['env_dynamics'], actions, dim, issues)
        perception = self._perception(obj['perception'], domain, issues)
        reward_action = {}
        raw_actions = obj['reward_action']
        if isinstance(raw_actions, dict):
            for action in actions:
                entry = raw_actions.get(str(action))
                if entry is None:
                    continue
                fcp = self._value_fcp(entry, dim, f"reward_action[{action}]", issues)
                if fcp is not None:
                    reward_action[action] = fcp
        else:
            issues.append("reward_action must be an object keyed by action")
        reward_state = self._value_fcp(obj['reward_state'], dim, 'reward_state', issues)
        suggested = self._suggested(obj['suggested'], issues) if 'suggested' in obj else None
        beta = to_number(obj['beta'], 'beta', issues)

        if issues:
            raise ModelValidationError(issues)

        return NsPomdpModel(
            name=str(obj.get('name', default_name)),
            locs=locs,
            pers=pers,
            actions=actions,
            domain=domain,
            available_default=available_default,
            available=available,
            delta_A=delta_A,
            env_dyn=env_dyn,
            perception=perception,
            reward_action=reward_action,
            reward_state=reward_state,
            beta=beta,
            suggested=suggested,
        )

    def _suggested(self, raw: Any, issues: List[str]) -> Optional[Dict[Any, Tuple]]:
        if not isinstance(raw, list):
            issues.append("suggested must be a list of [per, [actions...]] pairs")
            return None
        table = {}
        for idx, entry in enumerate(raw):
            try:
                per, acts = entry
                table[to_label(per)] = tuple(to_label(a) for a in acts)
            except (TypeError, ValueError):
                issues.append(f"suggested[{idx}] must be [per, [actions...]]")
        return table

    def _available(self, raw: Any, issues: List[str]):
        if isinstance(raw, list):
            return tuple(to_label(a) for a in raw), {}
        if not isinstance(raw, dict):
            issues.append("available must be a list of actions or an object")
            return (), {}
        default = tuple(to_label(a) for a in raw.get('default', []))
        table: Dict[AgentState, Tuple] = {}
        for idx, entry in enumerate(raw.get('entries', [])):
            try:
                state, acts = entry
                table[AgentState(*to_label(state))] = tuple(to_label(a) for a in acts)
            except (TypeError, ValueError):
                issues.append(f"available.entries[{idx}] must be [[loc, per], [actions...]]")
        return default, table

    def _delta_a(self, raw: Any, issues: List[str]):
        table: Dict[Tuple[AgentState, Any], Dict[Any, float]] = {}
        if not isinstance(raw, list):
            issues.append("delta_A must be a list of [agent_state, action, loc', prob] triples")
            return table
        for idx, entry in enumerate(raw):
            try:
                state, action, loc_next, prob = entry
                key = (AgentState(*to_label(state)), to_label(action))
                row = table.setdefault(key, {})
                loc_next = to_label(loc_next)
                row[loc_next] = row.get(loc_next, 0.0) + float(prob)
            except (TypeError, ValueError):
                issues.append(f"delta_A[{idx}] must be [[loc, per], action, loc', prob]")
        return table

    def _env_dynamics(self, raw: Any, actions: Tuple, dim: int, issues: List[str]):
        dynamics = {}
        if not isinstance(raw, dict):
            issues.append("env_dynamics must be an object keyed by action")
            return dynamics
        # object keys are strings; match them against the declared action labels
        by_key = {str(a): a for a in actions}
        for action_key, components in raw.items():
            if action_key not in by_key:
                issues.append(f"env_dynamics: unknown action {action_key!r}")
                continue
            if not isinstance(components, list):
                issues.append(f"env_dynamics[{action_key}] must be a list of components")
                continue
            comps = []
            for ci, comp in enumerate(components):
                where = f"env_dynamics[{action_key}][{ci}]"
                pieces = []
                for pi, piece in enumerate(require(comp, 'pieces', where, issues, [])):
                    if not isinstance(piece, dict):
                        issues.append(f"{where}.pieces[{pi}] must be an object")
                        continue
                    guard = to_polytope(require(piece, 'guard', f"{where}.pieces[{pi}]", issues, []), dim,
                                        f"{where}.pieces[{pi}].guard", issues)
                    try:
                        move = AffineMap(piece.get('M', [[1.0 if i == j else 0.0 for j in range(dim)]
                                                          for i in range(dim)]),
                                         piece.get('c', [0.0] * dim))
                    except (ValueError, TypeError, DimensionMismatchError) as e:
                        issues.append(f"{where}.pieces[{pi}]: {e}")
                        continue
                    if guard is not None:
                        pieces.append(Piece(guard, move))
                weight = to_number(require(comp, 'weight', where, issues, 0.0), f"{where}.weight", issues)
                comps.append(Component(weight, tuple(pieces)))
            dynamics[by_key[action_key]] = EnvDynamics(tuple(comps))
        return dynamics

    def _perception(self, raw: Any, domain: Polytope, issues: List[str]) -> PerceptionSpec:
        if not isinstance(raw, dict):
            issues.append("perception must be an object")
            return PerceptionSpec(domain)
        default = self._percepts(raw['default'], domain.dim, 'perception.default', issues) \
            if 'default' in raw else None
        per_loc = {}
        for idx, entry in enumerate(raw.get('per_loc', [])):
            try:
                loc, spec = entry
            except (TypeError, ValueError):
                issues.append(f"perception.per_loc[{idx}] must be [loc, percepts]")
                continue
            per_loc[to_label(loc)] = self._percepts(spec, domain.dim, f"perception.per_loc[{idx}]", issues)
        return PerceptionSpec(domain, default, per_loc)

    def _percepts(self, raw: Any, dim: int, where: str, issues: List[str]) -> Optional[Union[Fcp, ReluNet]]:
        if not isinstance(raw, dict):
            issues.append(f"{where} must be an object")
            return None
        if 'network' in raw:
            return NetworkParser().parse_obj(raw['network'])
        if 'network_file' in raw:
            path = Path(raw['network_file'])
            if not path.is_absolute() and self.base_dir is not None:
                path = self.base_dir / path
            return NetworkParser().parse_file(path)
        regions = []
        for idx, entry in enumerate(require(raw, 'regions', where, issues, [])):
            poly = to_polytope(require(entry, 'polytope', f"{where}.regions[{idx}]", issues, []), dim,
                               f"{where}.regions[{idx}]", issues)
            if poly is not None:
                regions.append((poly, to_label(require(entry, 'per', f"{where}.regions[{idx}]", issues))))
        return Fcp(regions, dim) if regions else None

    def _value_fcp(self, raw: Any, dim: int, where: str, issues: List[str]) -> Optional[Fcp]:
        regions = []
        if not isinstance(raw, list):
            issues.append(f"{where} must be a list of {{polytope, value}} regions")
            return None
        for idx, entry in enumerate(raw):
            poly = to_polytope(require(entry, 'polytope', f"{where}[{idx}]", issues, []), dim,
                               f"{where}[{idx}]", issues)
            value = to_number(require(entry, 'value', f"{where}[{idx}]", issues, 0.0),
                              f"{where}[{idx}].value", issues)
            if poly is not None:
                regions.append((poly, value))
        if not regions:
            issues.append(f"{where} has no regions")
            return None
        return Fcp(regions, dim)


def _fcp_entries(fcp: Fcp, payload_key: str) -> List[dict]:
    return [{'polytope': poly.to_rows(), payload_key: from_label(payload)} for poly, payload in fcp.regions]


def _percepts_obj(src) -> dict:
    if isinstance(src, ReluNet):
        return {'network': NetworkParser.to_obj(src)}
    return {'regions': _fcp_entries(src, 'per')}


def model_to_obj(model: NsPomdpModel) -> dict:
    obj = {
        'name': model.name,
        'locs': [from_label(v) for v in model.locs],
        'pers': [from_label(v) for v in model.pers],
        'actions': [from_label(v) for v in model.actions],
        'domain': model.domain.to_rows(),
        'available': {
            'default': [from_label(a) for a in model.available_default],
            'entries': [[from_label(tuple(s)), [from_label(a) for a in acts]]
                        for s, acts in model.available.items()],
        },
        'delta_A': [[from_label(tuple(state)), from_label(action), from_label(loc), prob]
                    for (state, action), row in model.delta_A.items() for loc, prob in row.items()],
        'env_dynamics': {
            str(action): [
                {'weight': comp.weight,
                 'pieces': [dict(guard=piece.guard.to_rows(), **piece.map.to_dict()) for piece in comp.pieces]}
                for comp in dyn.components
            ]
            for action, dyn in model.env_dyn.items()
        },
        'perception': {},
        'reward_action': {str(a): _fcp_entries(fcp, 'value') for a, fcp in model.reward_action.items()},
        'reward_state': _fcp_entries(model.reward_state, 'value'),
        'beta': model.beta,
    }
    if model.perception.default is not None:
        obj['perception']['default'] = _percepts_obj(model.perception.default)
    if model.perception.per_loc:
        obj['perception']['per_loc'] = [[from_label(loc), _percepts_obj(src)]
                                        for loc, src in model.perception.per_loc.items()]
    if model.suggested is not None:
        obj['suggested'] = [[from_label(per), [from_label(a) for a in acts]] for per, acts in model.suggested.items()]
    return obj


def load_model(text: str) -> NsPomdpModel:
    return ModelParser().parse_text(text)


def dump_model(model: NsPomdpModel) -> str:
    return dump_json(model_to_obj(model))
