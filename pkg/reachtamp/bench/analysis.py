"""
Aggregation of results files: success-rate CDFs over solve time and
per-group comparison of success rates, times and counters.
"""

from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from reachtamp.bench.models import COUNTER_FIELDS, TrialRecord
from reachtamp.utils.exceptions import ValidationError
from reachtamp.utils.logging_config import get_logger
from reachtamp.utils.validation import GROUP_KEYS

logger = get_logger(__name__)


class CdfStep(BaseModel):
    time: float
    fraction: float


class CdfTable(BaseModel):
    group: Dict[str, str]
    trials: int
    steps: List[CdfStep]
    success_rate: float


class GroupSummary(BaseModel):
    group: Dict[str, str]
    trials: int
    solved: int
    success_rate: float
    median_solve_time: Optional[float] = None
    counter_means: Dict[str, float]


def group_records(records: Sequence[TrialRecord],
                  keys: Sequence[str]) -> Dict[Tuple[str, ...], List[TrialRecord]]:
    unknown = [k for k in keys if k not in GROUP_KEYS]
    if unknown:
        raise ValidationError(f"Cannot group by {unknown}")
    groups: Dict[Tuple[str, ...], List[TrialRecord]] = defaultdict(list)
    for record in records:
        groups[tuple(str(getattr(record, k)) for k in keys)].append(record)
    return dict(sorted(groups.items()))


def cdf_steps(times: Sequence[float], trials: int) -> List[CdfStep]:
    """Cumulative fraction of `trials` solved by each distinct solve time."""
    if trials <= 0:
        return []
    ordered = np.sort(np.asarray(times, dtype=float))
    distinct, counts = np.unique(ordered, return_counts=True)
    cumulative = np.cumsum(counts)
    return [CdfStep(time=float(t), fraction=float(c) / trials) for t, c in zip(distinct, cumulative)]


def cdf(records: Sequence[TrialRecord], keys: Sequence[str]) -> List[CdfTable]:
    """
    Per group, the step function of solved fraction over wall time.

    The last step equals the group's success rate; a group without
    successes has no steps.
    """
    tables = []
    for group, members in group_records(records, keys).items():
        times = [r.wall_time for r in members if r.solved]
        tables.append(CdfTable(
            group=dict(zip(keys, group)),
            trials=len(members),
            steps=cdf_steps(times, len(members)),
            success_rate=len(times) / len(members),
        ))
    return tables


def compare(records: Sequence[TrialRecord], keys: Sequence[str] = ("variant",)) -> List[GroupSummary]:
    """Success rate, median solve time and mean counters for each group."""
    summaries = []
    for group, members in group_records(records, keys).items():
        solved_times = [r.wall_time for r in members if r.solved]
        means = {
            field: float(np.mean([getattr(r, field) for r in members]))
            for field in COUNTER_FIELDS
        }
        summaries.append(GroupSummary(
            group=dict(zip(keys, group)),
            trials=len(members),
            solved=len(solved_times),
            success_rate=len(solved_times) / len(members),
            median_solve_time=float(np.median(solved_times)) if solved_times else None,
            counter_means=means,
        ))
    logger.debug(f"Compared {len(records)} records in {len(summaries)} groups")
    return summaries
