"""
Fixed-base planar 3-link revolute arm: forward kinematics, link geometry and
damped least-squares inverse kinematics.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from reachtamp.config import (
    IK_ANGLE_TOLERANCE,
    IK_DAMPING,
    IK_MAX_ITERATIONS,
    IK_POSITION_TOLERANCE,
    IK_RESTARTS,
)
from reachtamp.geometry.pose import TWO_PI, Pose2, normalize_angle
from reachtamp.geometry.shapes import Polygon
from reachtamp.utils.exceptions import InvalidShapeError, JointLimitError

Config = Tuple[float, ...]

FULL_CIRCLE = ((-math.pi, math.pi),) * 3


@dataclass(frozen=True)
class ArmModel:
    base: Pose2 = field(default_factory=Pose2)
    link_lengths: Tuple[float, ...] = (1.0, 0.8, 0.6)
    link_width: float = 0.04
    joint_limits: Tuple[Tuple[float, float], ...] = FULL_CIRCLE
    gripper_standoff: float = 0.02

    def __post_init__(self):
        if len(self.link_lengths) != 3 or len(self.joint_limits) != 3:
            raise InvalidShapeError("The arm has exactly three links and three joints")
        if any(length <= 0 for length in self.link_lengths):
            raise InvalidShapeError(f"Link lengths must be positive: {self.link_lengths}")
        if any(lo >= hi for lo, hi in self.joint_limits):
            raise InvalidShapeError(f"Joint limits must satisfy lo < hi: {self.joint_limits}")
        if self.link_width <= 0 or self.gripper_standoff < 0:
            raise InvalidShapeError("Link width must be positive and standoff non-negative")
        tail = self.link_lengths[-1] - self.gripper_standoff - self.link_width / 2
        if tail <= 0:
            raise InvalidShapeError("Last link is too short for its gripper standoff")

    @property
    def dof(self) -> int:
        return len(self.link_lengths)

    @property
    def reach(self) -> float:
        return float(sum(self.link_lengths))

    @cached_property
    def continuous_joints(self) -> Tuple[bool, ...]:
        return tuple(hi - lo >= TWO_PI - 1e-9 for lo, hi in self.joint_limits)

    @cached_property
    def link_shapes(self) -> Tuple[Polygon, ...]:
        """Link outlines in their joint frames; the last one stops short of the end-effector."""
        radius = self.link_width / 2
        lengths = list(self.link_lengths)
        lengths[-1] -= self.gripper_standoff + radius
        return tuple(Polygon.capsule(length, radius) for length in lengths)

    def within_limits(self, q: Sequence[float], tolerance: float = 1e-12) -> bool:
        return len(q) == self.dof and all(
            lo - tolerance <= qi <= hi + tolerance for qi, (lo, hi) in zip(q, self.joint_limits)
        )

    def normalize(self, q: Sequence[float]) -> Config:
        """Wrap continuous joints, clip bounded ones."""
        return tuple(
            normalize_angle(qi) if cont else min(max(qi, lo), hi)
            for qi, cont, (lo, hi) in zip(q, self.continuous_joints, self.joint_limits)
        )

    def random_config(self, rng: np.random.Generator) -> Config:
        return self.normalize(tuple(float(rng.uniform(lo, hi)) for lo, hi in self.joint_limits))


@dataclass(frozen=True)
class ForwardKinematics:
    ee: Pose2
    link_frames: Tuple[Pose2, ...]


def fk(arm: ArmModel, q: Sequence[float], check_limits: bool = True) -> ForwardKinematics:
    if check_limits and not arm.within_limits(q):
        raise JointLimitError(f"Configuration {tuple(q)} violates joint limits {arm.joint_limits}")
    x, y, theta = arm.base.x, arm.base.y, arm.base.theta
    frames = []
    for length, qi in zip(arm.link_lengths, q):
        theta += qi
        frames.append(Pose2(x, y, theta))
        x += length * math.cos(theta)
        y += length * math.sin(theta)
    return ForwardKinematics(ee=Pose2(x, y, theta), link_frames=tuple(frames))


def end_effector(arm: ArmModel, q: Sequence[float]) -> Pose2:
    return fk(arm, q).ee


def jacobian(arm: ArmModel, q: Sequence[float]) -> np.ndarray:
    """3x3 Jacobian of (x, y, theta) with respect to the joint angles."""
    angles = arm.base.theta + np.cumsum(q)
    lengths = np.asarray(arm.link_lengths)
    dx = -lengths * np.sin(angles)
    dy = lengths * np.cos(angles)
    # joint i moves every link from i outward
    jx = np.cumsum(dx[::-1])[::-1]
    jy = np.cumsum(dy[::-1])[::-1]
    return np.vstack((jx, jy, np.ones(len(lengths))))


def _pose_error(arm: ArmModel, q: Sequence[float], target: Pose2) -> np.ndarray:
    ee = fk(arm, q, check_limits=False).ee
    return np.array([target.x - ee.x, target.y - ee.y, normalize_angle(target.theta - ee.theta)])


def ik(arm: ArmModel,
       target: Pose2,
       q_seed: Sequence[float],
       rng: Optional[np.random.Generator] = None,
       *,
       max_iterations: int = IK_MAX_ITERATIONS,
       restarts: int = IK_RESTARTS,
       damping: float = IK_DAMPING) -> Optional[Config]:
    """
    Solve for a configuration placing the end-effector at `target`.

    Starts from `q_seed`, then from up to `restarts` random seeds drawn from
    `rng`. Returns None when no seed converges within tolerance.
    """
    if target.position_error(arm.base) > arm.reach + IK_POSITION_TOLERANCE:
        return None
    if rng is None:
        rng = np.random.default_rng(0)

    damping_sq = damping * damping
    identity = np.eye(3)
    seed = arm.normalize(q_seed)
    for attempt in range(restarts + 1):
        if attempt > 0:
            seed = arm.random_config(rng)
        q = np.array(seed, dtype=float)
        for _ in range(max_iterations):
            error = _pose_error(arm, q, target)
            if math.hypot(error[0], error[1]) < 0.01 * IK_POSITION_TOLERANCE and abs(error[2]) < 0.01 * IK_ANGLE_TOLERANCE:
                break
            J = jacobian(arm, q)
            q = q + J.T @ np.linalg.solve(J @ J.T + damping_sq * identity, error)
            q = np.array(arm.normalize(q))
        candidate = arm.normalize(q)
        error = _pose_error(arm, candidate, target)
        if (math.hypot(error[0], error[1]) <= IK_POSITION_TOLERANCE
                and abs(error[2]) <= IK_ANGLE_TOLERANCE
                and arm.within_limits(candidate)):
            return tuple(float(v) for v in candidate)
    return None
