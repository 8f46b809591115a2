from src.commands.base import CommandResult, load_belief_arg, load_model_arg
from src.core.exceptions import ConfigurationError
from src.models.belief import ParticleBelief
from src.services.exports import write_csv
from src.services.robustness import run_robustness
from src.utils.helpers import magnitudes


def register(subparsers):
    parser = subparsers.add_parser('robustness', help='Lower bounds at disturbed particle beliefs')
    parser.add_argument('--model', required=True)
    parser.add_argument('--belief', required=True, help='particle belief to disturb')
    parser.add_argument('--out', required=True, help='CSV of magnitude, sample, particle_lb, region_lb')
    parser.add_argument('--magnitudes', type=int, default=20, help='number of disturbance magnitudes')
    parser.add_argument('--max-magnitude', type=float, default=0.5)
    parser.add_argument('--samples', type=int, default=1, help='directions per magnitude')
    parser.add_argument('--epsilon', type=float, default=1e-2)
    parser.add_argument('--seed', type=int, default=0)
    parser.set_defaults(handler=run)


def run(args) -> CommandResult:
    model = load_model_arg(args.model)
    b0 = load_belief_arg(model, args.belief)
    if not isinstance(b0, ParticleBelief):
        raise ConfigurationError("robustness needs a particle belief")
    frame = run_robustness(model, b0, magnitudes(args.magnitudes, args.max_magnitude), args.samples,
                           args.epsilon, args.seed)
    write_csv(frame, args.out)
    wins = int((frame['region_lb'] >= frame['particle_lb'] - args.epsilon).sum())
    return CommandResult(f"{wins}/{len(frame)} samples with region lb >= particle lb - epsilon",
                         {'samples': len(frame), 'region_not_worse': wins})
