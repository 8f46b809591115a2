"""CSV and polygon-dump exports of solver output."""
from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd

from src.core.logger import get_logger
from src.geometry import Fcp, dump_polygons, product_fcp
from src.models.nspomdp import NsPomdpModel
from src.services.alpha import AlphaFunction
from src.services.hsvi import TraceRow
from src.services.strategy import PathRecord

logger = get_logger(__name__)

FLOAT_FORMAT = '%.10g'
TRACE_COLUMNS = ['iter', 'lb', 'ub', 'gamma_size', 'upsilon_size', 'millis']
AXES = ('x', 'y', 'z')


def trace_frame(trace: Sequence[TraceRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in trace], columns=TRACE_COLUMNS)


def path_frame(model: NsPomdpModel, records: Sequence[PathRecord]) -> pd.DataFrame:
    axes = [AXES[i] if model.dim <= len(AXES) else f"x{i}" for i in range(model.dim)]
    rows = []
    for run, record in enumerate(records):
        for step, (entry, so_far) in enumerate(zip(record.steps, record.returns_so_far(model.beta))):
            row = {'run': run, 'step': step, 'loc': entry.agent_state.loc, 'per': entry.agent_state.per}
            row.update(dict(zip(axes, entry.point.tolist())))
            row.update(action=entry.action, reward=entry.reward, return_so_far=so_far)
            rows.append(row)
    columns = ['run', 'step', 'loc', 'per'] + axes + ['action', 'reward', 'return_so_far']
    return pd.DataFrame(rows, columns=columns)


def summary_frame(records: Sequence[PathRecord]) -> pd.DataFrame:
    return pd.DataFrame([{
        'run': run,
        'return': record.discounted_return,
        'compliance': record.compliance,
        'mean_trust': record.mean_trust,
    } for run, record in enumerate(records)], columns=['run', 'return', 'compliance', 'mean_trust'])


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_trace(trace: Sequence[TraceRow], path: Union[str, Path]) -> Path:
    return write_csv(trace_frame(trace), path)


def write_paths(model: NsPomdpModel, records: Sequence[PathRecord], path: Union[str, Path]) -> Path:
    """Path CSV plus a per-run summary next to it."""
    path = Path(path)
    write_csv(path_frame(model, records), path)
    write_csv(summary_frame(records), path.with_name(f"{path.stem}_summary.csv"))
    return path


def alpha_lines(model: NsPomdpModel, alpha: AlphaFunction):
    """(label, region, value) per piece over the perception partition of every agent state."""
    lines = []
    fcp = model.perception_fcp()
    for state in fcp.agent_states():
        if state in alpha.regions:
            pieces = alpha.regions[state]
        else:
            pieces = [(region, alpha.default) for region in fcp.for_state(state)]
        lines.extend((f"{state.loc}:{state.per}", poly, value) for poly, value in pieces)
    return lines


def max_lines(model: NsPomdpModel, alphas: Sequence[AlphaFunction]):
    """Pointwise maximum of alphas on the common refinement of their pieces, per agent state."""
    lines = []
    fcp = model.perception_fcp()
    for state in fcp.agent_states():
        best = Fcp([(region, -float('inf')) for region in fcp.for_state(state)], model.dim)
        for alpha in alphas:
            best = product_fcp(best, alpha.as_fcp(state), max)
        lines.extend((f"{state.loc}:{state.per}", poly, value) for poly, value in best.regions)
    return lines


def export_values(model: NsPomdpModel, alphas: Sequence[AlphaFunction], directory: Union[str, Path],
                  first: int = 0) -> List[Path]:
    """alpha_<i>.txt per alpha-function, plus max.txt over the first N when first > 0."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for idx, alpha in enumerate(alphas):
        path = directory / f"alpha_{idx}.txt"
        path.write_text(dump_polygons(alpha_lines(model, alpha)), encoding='utf-8')
        written.append(path)
    if first > 0:
        path = directory / 'max.txt'
        path.write_text(dump_polygons(max_lines(model, alphas[:first])), encoding='utf-8')
        written.append(path)
    logger.info(f"Exported {len(written)} value files to {directory}")
    return written
