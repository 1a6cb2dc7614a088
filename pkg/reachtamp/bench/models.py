"""
Records and configuration of the benchmark harness.
"""

import enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from reachtamp.config import DEFAULT_TIMEOUT, DEFAULT_TRIALS, TRIAL_GRACE
from reachtamp.utils.exceptions import ValidationError as ReachTampValidationError
from reachtamp.utils.validation import validate_domain_name, validate_movable_count, validate_variant


class Outcome(str, enum.Enum):
    SOLVED = "solved"
    TIMEOUT = "timeout"
    INFEASIBLE = "infeasible"
    ERROR = "error"


class TrialRecord(BaseModel):
    """One line of a results file."""

    model_config = ConfigDict(frozen=True)

    instance: str
    domain: str
    m: int = Field(ge=1)
    variant: str
    seed: int
    outcome: Outcome
    wall_time: float = Field(ge=0)
    iterations: int = Field(default=0, ge=0)
    mp_calls: int = Field(default=0, ge=0)
    collision_checks: int = Field(default=0, ge=0)
    goal_candidates_drawn: int = Field(default=0, ge=0)
    goal_candidates_rejected: int = Field(default=0, ge=0)
    task_plan_calls: int = Field(default=0, ge=0)
    task_plan_seconds: float = Field(default=0.0, ge=0)
    art_size: int = Field(default=0, ge=0)
    rt_size: int = Field(default=0, ge=0)
    solution_length: Optional[int] = None
    valid: Optional[bool] = None
    message: Optional[str] = None

    @property
    def key(self):
        return self.instance, self.variant, self.seed

    @property
    def solved(self) -> bool:
        return self.outcome is Outcome.SOLVED


COUNTER_FIELDS = (
    "iterations",
    "mp_calls",
    "collision_checks",
    "goal_candidates_drawn",
    "goal_candidates_rejected",
    "task_plan_calls",
    "art_size",
    "rt_size",
)

# excluded when comparing two runs for determinism
TIMING_FIELDS = ("wall_time", "task_plan_seconds")


class SuiteConfig(BaseModel):
    """
    A benchmark suite. Field names mirror the `run` command's flags, so a JSON
    config file and a command line describe the same suite.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    domain: List[str] = Field(min_length=1)
    m: List[int] = Field(min_length=1)
    variant: List[str] = Field(default_factory=lambda: ["full"], min_length=1)
    trials: int = Field(default=DEFAULT_TRIALS, ge=1)
    timeout: float = Field(default=DEFAULT_TIMEOUT, gt=0)
    grace: float = Field(default=TRIAL_GRACE, ge=0)
    seed: int = 0
    out: Path
    workers: int = Field(default=1, ge=1)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    validate_solutions: bool = True

    @field_validator("domain")
    @classmethod
    def _canonical_domains(cls, value: List[str]) -> List[str]:
        try:
            return [validate_domain_name(d) for d in value]
        except ReachTampValidationError as e:
            raise ValueError(str(e)) from e

    @field_validator("variant")
    @classmethod
    def _known_variants(cls, value: List[str]) -> List[str]:
        try:
            return [validate_variant(v) for v in value]
        except ReachTampValidationError as e:
            raise ValueError(str(e)) from e

    def check_sizes(self) -> None:
        """Raise ValidationError if some m is out of range for some domain."""
        for domain in self.domain:
            for m in self.m:
                validate_movable_count(domain, m)

    def trial_keys(self):
        """(domain, m, variant, seed) in submission order."""
        for domain in self.domain:
            for m in self.m:
                for variant in self.variant:
                    for k in range(self.trials):
                        yield domain, m, variant, self.seed + k
