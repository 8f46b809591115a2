from src.models.perception import (
    ReluNet,
    PerceptionSpec,
    PerceptionFcp,
    enumerate_preimage,
    perception_fcp,
    region_in_percept
)
from src.models.nspomdp import (
    AgentState,
    Piece,
    Component,
    EnvDynamics,
    EnvPwc,
    GlobalBounds,
    NsPomdpModel,
    stay_pieces,
    validate_model,
    preimage_witness_issues
)
from src.models.belief import (
    ParticleBelief,
    RegionBelief,
    Belief,
    Branch,
    branches,
    obs_prob,
    update,
    particle_update,
    region_update,
    expect_pwc,
    support_mass,
    mixture,
    check_compatible
)

__all__ = [
    'ReluNet',
    'PerceptionSpec',
    'PerceptionFcp',
    'enumerate_preimage',
    'perception_fcp',
    'region_in_percept',
    'AgentState',
    'Piece',
    'Component',
    'EnvDynamics',
    'EnvPwc',
    'GlobalBounds',
    'NsPomdpModel',
    'stay_pieces',
    'validate_model',
    'preimage_witness_issues',
    'ParticleBelief',
    'RegionBelief',
    'Belief',
    'Branch',
    'branches',
    'obs_prob',
    'update',
    'particle_update',
    'region_update',
    'expect_pwc',
    'support_mass',
    'mixture',
    'check_compatible',
]
