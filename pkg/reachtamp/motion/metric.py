"""
Configuration-space metric with angular wrapping on continuous joints.
"""

import math
from typing import Iterator, Sequence

import numpy as np

from reachtamp.geometry.arm import ArmModel, Config
from reachtamp.geometry.pose import TWO_PI


def config_difference(arm: ArmModel, qa: Sequence[float], qb: Sequence[float]) -> np.ndarray:
    """Shortest joint-wise displacement from qa to qb."""
    diff = np.asarray(qb, dtype=float) - np.asarray(qa, dtype=float)
    wrap = np.asarray(arm.continuous_joints)
    diff[wrap] = (diff[wrap] + math.pi) % TWO_PI - math.pi
    return diff


def config_distance(arm: ArmModel, qa: Sequence[float], qb: Sequence[float]) -> float:
    return float(np.linalg.norm(config_difference(arm, qa, qb)))


def interpolate(arm: ArmModel, qa: Sequence[float], qb: Sequence[float], t: float) -> Config:
    if t >= 1.0:
        return tuple(qb)
    if t <= 0.0:
        return tuple(qa)
    return arm.normalize(np.asarray(qa, dtype=float) + t * config_difference(arm, qa, qb))


def discretize(arm: ArmModel, qa: Sequence[float], qb: Sequence[float], resolution: float) -> Iterator[Config]:
    """Points from qa to qb inclusive, consecutive ones at most `resolution` apart."""
    count = max(1, math.ceil(config_distance(arm, qa, qb) / resolution))
    for k in range(count + 1):
        yield interpolate(arm, qa, qb, k / count)


def pairwise_distances(arm: ArmModel, configs: np.ndarray, q: Sequence[float]) -> np.ndarray:
    diff = configs - np.asarray(q, dtype=float)
    wrap = np.asarray(arm.continuous_joints)
    diff[:, wrap] = (diff[:, wrap] + math.pi) % TWO_PI - math.pi
    return np.sqrt(np.sum(diff * diff, axis=1))
