"""
Search hyperparameters and the planner variants compared in the benchmarks.
"""

import enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from reachtamp.config import (
    DEFAULT_TIMEOUT,
    EPSILON,
    K_GOAL,
    K_SS,
    PLANNER_NODE_BUDGET,
    TERMINATE_PROB,
)
from reachtamp.motion.rrt_connect import MPConfig
from reachtamp.utils.exceptions import ValidationError


class RewardMode(str, enum.Enum):
    FULL = "full"
    NO_REWARD = "no-reward"


class RejectionMode(str, enum.Enum):
    FULL = "full"
    NO_REJECTION = "no-rejection"


class FullExtensionReward(str, enum.Enum):
    """Reward when every action was realized but the goal connection failed."""

    ONE = "one"
    FRACTION = "fraction"


VARIANTS = {
    "full": (RewardMode.FULL, RejectionMode.FULL),
    "no-reward": (RewardMode.NO_REWARD, RejectionMode.FULL),
    "no-rejection": (RewardMode.FULL, RejectionMode.NO_REJECTION),
}


class SearchParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k_ss: int = Field(default=K_SS, ge=1)
    k_goal: int = Field(default=K_GOAL, ge=1)
    epsilon: float = Field(default=EPSILON, ge=0.0, le=1.0)
    terminate_prob: float = Field(default=TERMINATE_PROB, ge=0.0, le=1.0)
    reward_mode: RewardMode = RewardMode.FULL
    rejection_mode: RejectionMode = RejectionMode.FULL
    full_extension_reward: FullExtensionReward = FullExtensionReward.ONE
    seed: int = 0
    timeout: float = Field(default=DEFAULT_TIMEOUT, gt=0)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    planner_budget: int = Field(default=PLANNER_NODE_BUDGET, ge=1)
    mp: MPConfig = Field(default_factory=MPConfig)

    @classmethod
    def for_variant(cls, variant: str, **overrides) -> "SearchParams":
        try:
            reward_mode, rejection_mode = VARIANTS[variant]
        except KeyError:
            raise ValidationError(f"Unknown planner variant '{variant}'. Use one of {', '.join(VARIANTS)}") from None
        return cls(reward_mode=reward_mode, rejection_mode=rejection_mode, **overrides)

    @property
    def variant(self) -> str:
        for name, modes in VARIANTS.items():
            if modes == (self.reward_mode, self.rejection_mode):
                return name
        return f"{self.reward_mode.value}+{self.rejection_mode.value}"

    @property
    def uses_reward(self) -> bool:
        return self.reward_mode is RewardMode.FULL

    @property
    def uses_rejection(self) -> bool:
        return self.rejection_mode is RejectionMode.FULL

    def full_extension_value(self, plan_length: int) -> float:
        if self.full_extension_reward is FullExtensionReward.ONE:
            return 1.0
        return plan_length / (plan_length + 1)
