from pathlib import Path
from typing import Union

from src.core.exceptions import BeliefError, ModelValidationError
from src.models.belief import PARTICLES, REGION, Belief, ParticleBelief, RegionBelief, check_compatible
from src.models.nspomdp import NsPomdpModel
from src.parser.helper import dump_json, from_label, load_json, to_label, to_polytope


class BeliefParser:
    """Belief literals: {"type": "particles", "agent_state", "points", "weights"}
    or {"type": "region", "agent_state", "polytopes", "densities"}; omitted weights mean uniform."""

    def __init__(self, model: NsPomdpModel = None):
        self.model = model

    def parse_file(self, file_path: Union[str, Path]) -> Belief:
        return self.parse_text(Path(file_path).read_text(encoding='utf-8'))

    def parse_text(self, text: str) -> Belief:
        return self.parse_obj(load_json(text, 'belief literal'))

    def parse_obj(self, obj: dict) -> Belief:
        issues = []
        kind = obj.get('type') if isinstance(obj, dict) else None
        if kind not in (PARTICLES, REGION):
            raise ModelValidationError([f"belief: type must be '{PARTICLES}' or '{REGION}'"])
        if 'agent_state' not in obj:
            raise ModelValidationError(["belief: missing key 'agent_state'"])
        state = to_label(obj['agent_state'])
        dim = self.model.dim if self.model is not None else None
        try:
            if kind == PARTICLES:
                belief = ParticleBelief.create(state, obj.get('points', []), obj.get('weights'))
                if dim is not None and belief.points.shape[1] != dim:
                    issues.append(f"belief: points have dimension {belief.points.shape[1]}, expected {dim}")
            else:
                polys = []
                for idx, rows in enumerate(obj.get('polytopes', [])):
                    poly = to_polytope(rows, dim, f"belief.polytopes[{idx}]", issues)
                    if poly is not None:
                        polys.append(poly)
                if issues:
                    raise ModelValidationError(issues)
                belief = RegionBelief.create(state, polys, obj.get('densities'))
        except BeliefError as e:
            raise ModelValidationError([f"belief: {e}"]) from e
        if issues:
            raise ModelValidationError(issues)
        if self.model is not None:
            check_compatible(self.model, belief)
        return belief

    @staticmethod
    def to_obj(belief: Belief) -> dict:
        state = [from_label(belief.agent_state.loc), from_label(belief.agent_state.per)]
        if isinstance(belief, ParticleBelief):
            return {
                'type': PARTICLES,
                'agent_state': state,
                'points': belief.points.tolist(),
                'weights': belief.weights.tolist(),
            }
        return {
            'type': REGION,
            'agent_state': state,
            'polytopes': [poly.to_rows() for poly in belief.regions],
            'densities': belief.densities.tolist(),
        }

    def dump(self, belief: Belief) -> str:
        return dump_json(self.to_obj(belief))
