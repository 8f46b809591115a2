from pathlib import Path

from src.commands.base import OK, VALIDATION, CommandResult
from src.geometry import dump_polygons, partition_issues
from src.models.perception import enumerate_preimage
from src.parser.network_file import NetworkParser
from src.utils.helpers import parse_box


def register(subparsers):
    parser = subparsers.add_parser('preimage', help='Exact classification regions of a ReLU network')
    parser.add_argument('--net', required=True, help='network weight file')
    parser.add_argument('--domain', required=True, help='box as lo,hi per axis')
    parser.add_argument('--out', required=True, help='polygon dump file')
    parser.set_defaults(handler=run)


def run(args) -> CommandResult:
    net = NetworkParser().parse_file(args.net)
    domain = parse_box(args.domain)
    fcp = enumerate_preimage(net, domain)

    rank = {label: idx for idx, label in enumerate(net.labels)}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dump_polygons([(str(label), poly, rank[label]) for poly, label in fcp.regions]), encoding='utf-8')

    issues = partition_issues(fcp, domain)
    data = {'regions': len(fcp), 'classes': len(set(fcp.payloads())), 'issues': issues}
    text = f"{len(fcp)} regions, {data['classes']} classes, coverage {'ok' if not issues else 'FAILED'}"
    return CommandResult(text, data, VALIDATION if issues else OK)
