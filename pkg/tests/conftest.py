import numpy as np
import pytest

from src.geometry import AffineMap, Fcp, Polytope
from src.models.belief import ParticleBelief
from src.models.catalog import build_model
from src.models.nspomdp import AgentState, Component, EnvDynamics, NsPomdpModel, stay_pieces
from src.models.perception import PerceptionSpec, ReluNet

SQUARE = Polytope.box([0.0, 0.0], [4.0, 4.0])
QUADRANTS = [
    Polytope.box([0.0, 0.0], [2.0, 2.0]),
    Polytope.box([2.0, 0.0], [4.0, 2.0]),
    Polytope.box([0.0, 2.0], [2.0, 4.0]),
    Polytope.box([2.0, 2.0], [4.0, 4.0]),
]
MOVES = [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0)]


@pytest.fixture(scope='session')
def carpark4():
    return build_model('carpark4_grid')


@pytest.fixture(scope='session')
def carpark4_obstacle():
    return build_model('carpark4_grid_obstacle')


@pytest.fixture(scope='session')
def carpark4_obstacle_5000():
    return build_model('carpark4_grid_obstacle_5000')


def start_belief(model, points, trust=1):
    """Particle belief at the given trust level, percept read off the first point."""
    per = model.observe(trust, points[0])
    return ParticleBelief.create(AgentState(trust, per), points)


def random_model(seed: int, n_locs: int = 2, n_pers: int = 3, n_actions: int = 2, n_components: int = 1,
                 beta: float = 0.5) -> NsPomdpModel:
    """Small model on [0,4]^2: quadrant percepts, integer moves clamped at the border."""
    rng = np.random.default_rng(seed)
    locs = tuple(range(1, n_locs + 1))
    pers = tuple(range(1, n_pers + 1))
    actions = tuple(f"a{i}" for i in range(n_actions))

    per_loc = {}
    for loc in locs:
        labels = list(pers) + [int(rng.choice(pers)) for _ in range(len(QUADRANTS) - n_pers)]
        rng.shuffle(labels)
        per_loc[loc] = Fcp(list(zip(QUADRANTS, labels[:len(QUADRANTS)])), 2)
    perception = PerceptionSpec(SQUARE, per_loc=per_loc)

    env_dyn = {}
    for action in actions:
        weights = rng.dirichlet(np.ones(n_components)) if n_components > 1 else [1.0]
        comps = []
        for weight in weights:
            move = MOVES[int(rng.integers(len(MOVES)))]
            comps.append(Component(float(weight), stay_pieces(SQUARE, AffineMap.translation(move))))
        total = sum(c.weight for c in comps)
        comps = [Component(c.weight / total, c.pieces) for c in comps]
        env_dyn[action] = EnvDynamics(tuple(comps))

    delta_A = {}
    for loc in locs:
        for per in pers:
            for action in actions:
                counts = rng.integers(1, 5, size=n_locs)
                delta_A[(AgentState(loc, per), action)] = {
                    l: float(c) / float(counts.sum()) for l, c in zip(locs, counts)
                }

    reward_state = Fcp([(q, float(rng.integers(-2, 3))) for q in QUADRANTS], 2)
    reward_action = {a: Fcp.single(SQUARE, float(rng.integers(-1, 2))) for a in actions}
    return NsPomdpModel(
        name=f"random_{seed}",
        locs=locs,
        pers=pers,
        actions=actions,
        domain=SQUARE,
        available_default=actions,
        available={},
        delta_A=delta_A,
        env_dyn=env_dyn,
        perception=perception,
        reward_action=reward_action,
        reward_state=reward_state,
        beta=beta,
    )


def random_particles(model: NsPomdpModel, seed: int, count: int = 2) -> ParticleBelief:
    """Particles with non-integer coordinates sharing the percept of the first one."""
    rng = np.random.default_rng(seed + 1000)
    loc = model.locs[int(rng.integers(len(model.locs)))]
    first = rng.uniform(0.05, 3.95, size=2)
    per = model.observe(loc, first)
    points = [first]
    while len(points) < count:
        x = rng.uniform(0.05, 3.95, size=2)
        if model.observe(loc, x) == per:
            points.append(x)
    weights = rng.dirichlet(np.ones(count))
    return ParticleBelief.create(AgentState(loc, per), points, weights)


def random_net(seed: int, h: int = 6, k: int = 4) -> ReluNet:
    rng = np.random.default_rng(seed)
    return ReluNet(rng.normal(size=(h, 2)), rng.normal(size=h), rng.normal(size=(k, h)), rng.normal(size=k),
                   tuple(range(1, k + 1)))


def zero_model() -> NsPomdpModel:
    """Absorbing, zero-reward model with one agent state."""
    move = AffineMap.identity(2)
    return NsPomdpModel(
        name='zero',
        locs=(1,),
        pers=(1,),
        actions=('stay', 'wait'),
        domain=SQUARE,
        available_default=('stay', 'wait'),
        available={},
        delta_A={(AgentState(1, 1), a): {1: 1.0} for a in ('stay', 'wait')},
        env_dyn={a: EnvDynamics((Component(1.0, stay_pieces(SQUARE, move)),)) for a in ('stay', 'wait')},
        perception=PerceptionSpec(SQUARE, default=Fcp.single(SQUARE, 1)),
        reward_action={a: Fcp.single(SQUARE, 0.0) for a in ('stay', 'wait')},
        reward_state=Fcp.single(SQUARE, 0.0),
        beta=0.8,
    )


def mixture_model() -> NsPomdpModel:
    """One location, a percept per quadrant; 'go' moves right or up with probability 1/2 each."""
    right = stay_pieces(SQUARE, AffineMap.translation([1.0, 0.0]))
    up = stay_pieces(SQUARE, AffineMap.translation([0.0, 1.0]))
    return NsPomdpModel(
        name='mixture',
        locs=(1,),
        pers=(1, 2, 3, 4),
        actions=('go',),
        domain=SQUARE,
        available_default=('go',),
        available={},
        delta_A={(AgentState(1, p), 'go'): {1: 1.0} for p in (1, 2, 3, 4)},
        env_dyn={'go': EnvDynamics((Component(0.5, right), Component(0.5, up)))},
        perception=PerceptionSpec(SQUARE, default=Fcp(list(zip(QUADRANTS, (1, 2, 3, 4))), 2)),
        reward_action={'go': Fcp.single(SQUARE, 0.0)},
        reward_state=Fcp(list(zip(QUADRANTS, (0.0, 1.0, 2.0, 3.0))), 2),
        beta=0.5,
    )
