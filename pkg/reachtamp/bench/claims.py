"""
Benchmark claims checked against recorded trials.

Each claim is a list of named gates over one results file: success-rate
floors, variant orderings, counter ratios and the task planner's share of
wall time. A claim holds when every gate passes.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel

from reachtamp.bench.models import TrialRecord
from reachtamp.utils.exceptions import ValidationError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

THRESHOLDS = {
    "kitchen_full_success_rate": 0.8,
    "rejection_mp_call_reduction": 0.20,
    "blocktower_success_rate": 0.7,
    "planner_time_share": 0.30,
    "sign_test_alpha": 0.05,
}


class Gate(BaseModel):
    name: str
    passed: bool
    detail: str


class ClaimResult(BaseModel):
    claim: str
    gates: List[Gate]

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gates)


def select(records: Sequence[TrialRecord], domain: str, m: Optional[int] = None,
           variant: Optional[str] = None) -> List[TrialRecord]:
    """
    Records of one (domain, m, variant) cell.

    Raises:
        ValidationError: If the cell is empty
    """
    chosen = [r for r in records
              if r.domain == domain and (m is None or r.m == m) and (variant is None or r.variant == variant)]
    if not chosen:
        label = "/".join(str(p) for p in (domain, m, variant) if p is not None)
        raise ValidationError(f"No trials recorded for {label}")
    return chosen


def solved_count(records: Sequence[TrialRecord]) -> int:
    return sum(r.solved for r in records)


def success_rate(records: Sequence[TrialRecord]) -> float:
    return solved_count(records) / len(records)


def sign_test_p(wins: int, losses: int) -> float:
    """One-sided sign test: P(at least `wins` successes in wins + losses fair coin flips)."""
    n = wins + losses
    if n == 0:
        return 1.0
    return sum(math.comb(n, k) for k in range(wins, n + 1)) / 2 ** n


def _valid_solutions(records: Sequence[TrialRecord]) -> Gate:
    invalid = [r for r in records if r.solved and r.valid is False]
    return Gate(name="solutions_valid", passed=not invalid,
                detail=f"{len(invalid)} invalid of {solved_count(records)} solved")


def _at_least(name: str, ours: Sequence[TrialRecord], theirs: Sequence[TrialRecord], label: str) -> Gate:
    a, b = solved_count(ours), solved_count(theirs)
    return Gate(name=name, passed=a >= b, detail=f"full {a}/{len(ours)} vs {label} {b}/{len(theirs)}")


def _rate_floor(name: str, records: Sequence[TrialRecord], floor: float) -> Gate:
    rate = success_rate(records)
    return Gate(name=name, passed=rate >= floor, detail=f"{rate:.0%} (floor {floor:.0%})")


def check_kitchen(records: Sequence[TrialRecord]) -> ClaimResult:
    """kitchen-3: full solves at least as often as both baselines and at least 80% of trials."""
    full = select(records, "kitchen", 3, "full")
    gates = [
        _at_least("full_vs_no_reward", full, select(records, "kitchen", 3, "no-reward"), "no-reward"),
        _at_least("full_vs_no_rejection", full, select(records, "kitchen", 3, "no-rejection"), "no-rejection"),
        _rate_floor("full_success_rate", full, THRESHOLDS["kitchen_full_success_rate"]),
        _valid_solutions(select(records, "kitchen", 3)),
    ]
    return ClaimResult(claim="kitchen", gates=gates)


def check_nonmonotonic(records: Sequence[TrialRecord]) -> ClaimResult:
    """
    nonmonotonic-2: full solves strictly more trials than no-reward. The paired
    sign test over seeds where exactly one variant solved is reported alongside.
    """
    full = select(records, "nonmonotonic", 2, "full")
    no_reward = select(records, "nonmonotonic", 2, "no-reward")
    a, b = solved_count(full), solved_count(no_reward)

    baseline = {r.seed: r.solved for r in no_reward}
    paired = [(r.solved, baseline[r.seed]) for r in full if r.seed in baseline]
    wins = sum(1 for ours, theirs in paired if ours and not theirs)
    losses = sum(1 for ours, theirs in paired if theirs and not ours)
    p = sign_test_p(wins, losses)

    gates = [
        Gate(name="full_beats_no_reward", passed=a > b,
             detail=f"full {a}/{len(full)} vs no-reward {b}/{len(no_reward)}"),
        Gate(name="paired_sign_test", passed=True,
             detail=f"{wins} wins, {losses} losses, p = {p:.3f} "
                    f"({'significant' if p < THRESHOLDS['sign_test_alpha'] else 'not significant'})"),
        _valid_solutions(select(records, "nonmonotonic", 2)),
    ]
    return ClaimResult(claim="nonmonotonic", gates=gates)


def check_rejection(records: Sequence[TrialRecord]) -> ClaimResult:
    """kitchen-3: goal-candidate rejection cuts mean motion-planner calls per trial by at least 20%."""
    full = select(records, "kitchen", 3, "full")
    no_rejection = select(records, "kitchen", 3, "no-rejection")
    ours = sum(r.mp_calls for r in full) / len(full)
    theirs = sum(r.mp_calls for r in no_rejection) / len(no_rejection)
    reduction = 1.0 - ours / theirs if theirs > 0 else 0.0
    floor = THRESHOLDS["rejection_mp_call_reduction"]
    gate = Gate(name="mp_call_reduction", passed=theirs > 0 and reduction >= floor,
                detail=f"{ours:.1f} vs {theirs:.1f} calls per trial, {reduction:.0%} fewer (floor {floor:.0%})")
    return ClaimResult(claim="rejection", gates=[gate])


def check_blocktower(records: Sequence[TrialRecord]) -> ClaimResult:
    """
    blocktower: full solves at least 70% of m=4 trials, and the task planner
    takes under 30% of wall time at every recorded size.
    """
    full = select(records, "blocktower", variant="full")
    gates = [_rate_floor("m4_success_rate", select(full, "blocktower", 4), THRESHOLDS["blocktower_success_rate"])]
    ceiling = THRESHOLDS["planner_time_share"]
    for m in sorted({r.m for r in full}):
        cell = select(full, "blocktower", m)
        wall = sum(r.wall_time for r in cell)
        share = sum(r.task_plan_seconds for r in cell) / wall if wall > 0 else 0.0
        gates.append(Gate(name=f"planner_share_m{m}", passed=share < ceiling,
                          detail=f"{share:.1%} of {wall:.1f}s (ceiling {ceiling:.0%})"))
    gates.append(_valid_solutions(full))
    return ClaimResult(claim="blocktower", gates=gates)


CLAIMS: Dict[str, Callable[[Sequence[TrialRecord]], ClaimResult]] = {
    "kitchen": check_kitchen,
    "nonmonotonic": check_nonmonotonic,
    "rejection": check_rejection,
    "blocktower": check_blocktower,
}


def check_claim(records: Sequence[TrialRecord], name: str) -> ClaimResult:
    """
    Raises:
        ValidationError: If the claim is unknown or the records lack a cell it needs
    """
    check = CLAIMS.get(name.strip().lower())
    if check is None:
        raise ValidationError(f"Unknown claim '{name}'. Valid claims are: {', '.join(CLAIMS)}")
    result = check(records)
    logger.info(f"Claim {result.claim}: {'holds' if result.passed else 'fails'}")
    return result
