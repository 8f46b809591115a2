from src.commands.base import BUDGET, CommandResult, load_belief_arg, load_model_arg
from src.core.logger import get_logger
from src.services.exports import export_values, write_trace
from src.services.hsvi import CONVERGED, SolveConfig, solve
from src.services.persistence import save_bounds

logger = get_logger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('solve', help='Bracket the optimal value at a belief')
    parser.add_argument('--model', required=True, help='bundled model name or model file')
    parser.add_argument('--belief', required=True, help='belief literal file (or inline JSON)')
    parser.add_argument('--epsilon', type=float, default=None)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--max-iterations', type=int, default=None)
    parser.add_argument('--trace', default=None, help='per-iteration CSV')
    parser.add_argument('--dump-alphas', default=None, help='directory for alpha-function polygon dumps')
    parser.add_argument('--bounds', default=None, help='directory to save the solved bounds')
    parser.set_defaults(handler=run)


def run(args) -> CommandResult:
    model = load_model_arg(args.model)
    b0 = load_belief_arg(model, args.belief)
    config = SolveConfig.from_settings(epsilon=args.epsilon, seed=args.seed, max_iterations=args.max_iterations)
    state = solve(model, b0, config)

    if args.trace:
        write_trace(state.trace, args.trace)
    if args.dump_alphas:
        export_values(model, list(state.lower), args.dump_alphas)
    if args.bounds:
        save_bounds(args.bounds, model, state.lower, state.upper)

    data = {
        'lb': state.lb,
        'ub': state.ub,
        'gap': state.gap,
        'iterations': state.iterations,
        'status': state.status,
    }
    text = f"{state.lb:.6f} {state.ub:.6f} {state.gap:.6g} {state.iterations}"
    if state.status != CONVERGED:
        logger.warning(f"Iteration budget exhausted with gap {state.gap:.6g}")
        return CommandResult(text, data, BUDGET)
    return CommandResult(text, data)
