import math

import numpy as np

from src.commands.base import CommandResult, load_belief_arg, load_model_arg
from src.core.loader import load_settings
from src.services.exports import write_paths
from src.services.persistence import load_bounds
from src.services.strategy import LookaheadStrategy, simulate_runs


def register(subparsers):
    parser = subparsers.add_parser('simulate', help='Simulate the lookahead strategy of saved bounds')
    parser.add_argument('--model', required=True)
    parser.add_argument('--bounds', required=True, help='directory written by solve --bounds')
    parser.add_argument('--belief', required=True)
    parser.add_argument('--runs', type=int, default=None)
    parser.add_argument('--horizon', type=int, default=None)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--out', required=True, help='path CSV')
    parser.set_defaults(handler=run)


def run(args) -> CommandResult:
    defaults = load_settings()['simulate']
    runs = args.runs if args.runs is not None else int(defaults['runs'])
    horizon = args.horizon if args.horizon is not None else int(defaults['horizon'])

    model = load_model_arg(args.model)
    b0 = load_belief_arg(model, args.belief)
    lower, _ = load_bounds(args.bounds, model)
    strategy = LookaheadStrategy(model, lower)
    records = simulate_runs(model, strategy, b0, runs, horizon, args.seed)
    write_paths(model, records, args.out)

    returns = np.array([r.discounted_return for r in records])
    mean = float(returns.mean()) if runs else 0.0
    stderr = float(returns.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
    truncation = records[0].truncation if records else 0.0
    data = {
        'runs': runs,
        'mean_return': mean,
        'std_error': stderr,
        'truncation': truncation,
        'lb': strategy.value(b0),
    }
    return CommandResult(f"{mean:.6f} {stderr:.6f} {truncation:.6g} {runs}", data)
