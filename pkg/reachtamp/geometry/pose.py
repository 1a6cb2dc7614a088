"""
SE(2) poses.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class Pose2:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def compose(self, other: "Pose2") -> "Pose2":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(self.x + c * other.x - s * other.y,
                     self.y + s * other.x + c * other.y,
                     self.theta + other.theta)

    __matmul__ = compose

    def inverse(self) -> "Pose2":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(-(c * self.x + s * self.y), s * self.x - c * self.y, -self.theta)

    def transform_point(self, px: float, py: float) -> Tuple[float, float]:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return self.x + c * px - s * py, self.y + s * px + c * py

    def transform_points(self, points: np.ndarray) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        rotation = np.array([[c, -s], [s, c]])
        return points @ rotation.T + np.array([self.x, self.y])

    def position_error(self, other: "Pose2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def angle_error(self, other: "Pose2") -> float:
        return abs(normalize_angle(self.theta - other.theta))

    def is_close(self, other: "Pose2", position_tol: float = 1e-9, angle_tol: float = 1e-9) -> bool:
        return self.position_error(other) <= position_tol and self.angle_error(other) <= angle_tol

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.x, self.y, self.theta


IDENTITY = Pose2()
