from src.commands.base import CommandResult, load_belief_arg, load_model_arg
from src.services.oracle import finite_horizon_value


def register(subparsers):
    parser = subparsers.add_parser('oracle', help='Finite-horizon value of a particle belief')
    parser.add_argument('--model', required=True)
    parser.add_argument('--belief', required=True)
    parser.add_argument('--horizon', type=int, required=True)
    parser.set_defaults(handler=run)


def run(args) -> CommandResult:
    model = load_model_arg(args.model)
    b0 = load_belief_arg(model, args.belief)
    result = finite_horizon_value(model, b0, args.horizon)
    data = {
        'horizon': result.h,
        'value': result.value,
        'lower': result.lower,
        'upper': result.upper,
        'nodes': result.nodes,
    }
    return CommandResult(f"{result.value:.6f} [{result.lower:.6f}, {result.upper:.6f}]", data)
