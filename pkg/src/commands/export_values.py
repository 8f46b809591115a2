from src.commands.base import CommandResult, load_model_arg
from src.services.exports import export_values
from src.services.persistence import load_bounds


def register(subparsers):
    parser = subparsers.add_parser('export-values', help='Polygon dumps of saved alpha-functions')
    parser.add_argument('--model', required=True)
    parser.add_argument('--bounds', required=True)
    parser.add_argument('--out', required=True, help='output directory')
    parser.add_argument('--first', type=int, default=0, help='also export the pointwise max of the first N')
    parser.set_defaults(handler=run)


def run(args) -> CommandResult:
    model = load_model_arg(args.model)
    lower, _ = load_bounds(args.bounds, model)
    written = export_values(model, list(lower), args.out, first=args.first)
    return CommandResult(f"{len(written)} files written to {args.out}",
                         {'files': [str(p) for p in written]})
