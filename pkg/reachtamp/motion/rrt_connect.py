"""
Bidirectional RRT-Connect inside the collision-free space of a single mode.
"""

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from reachtamp.config import MP_CHECK_RESOLUTION, MP_MAX_ITERATIONS, MP_STEP
from reachtamp.geometry.arm import ArmModel, Config
from reachtamp.geometry.scene import FreeSpace, Scene
from reachtamp.motion.metric import config_distance, discretize, interpolate, pairwise_distances
from reachtamp.tamp.modes import Mode
from reachtamp.utils.exceptions import GoalInCollisionError, IterationsExhaustedError, StartInCollisionError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


class MPConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    step: float = Field(default=MP_STEP, gt=0)
    check_resolution: float = Field(default=MP_CHECK_RESOLUTION, gt=0)
    max_iterations: int = Field(default=MP_MAX_ITERATIONS, gt=0)

    @model_validator(mode="after")
    def _resolution_below_step(self):
        if self.check_resolution > self.step:
            raise ValueError("check_resolution must not exceed step")
        return self


@dataclass(frozen=True)
class Trajectory:
    waypoints: Tuple[Config, ...]
    mode: Mode

    @property
    def start(self) -> Config:
        return self.waypoints[0]

    @property
    def end(self) -> Config:
        return self.waypoints[-1]

    def __len__(self) -> int:
        return len(self.waypoints)


class Status(enum.Enum):
    TRAPPED = 1
    ADVANCED = 2
    REACHED = 3


class _Tree:
    def __init__(self, arm: ArmModel, root: Config):
        self.arm = arm
        self.configs: List[Config] = [root]
        self.parents: List[int] = [-1]
        self._array = np.empty((64, len(root)))
        self._array[0] = root

    def __len__(self) -> int:
        return len(self.configs)

    def add(self, q: Config, parent: int) -> int:
        index = len(self.configs)
        if index == len(self._array):
            self._array = np.vstack((self._array, np.empty_like(self._array)))
        self._array[index] = q
        self.configs.append(q)
        self.parents.append(parent)
        return index

    def nearest(self, q: Config) -> int:
        return int(np.argmin(pairwise_distances(self.arm, self._array[:len(self.configs)], q)))

    def branch(self, index: int) -> List[Config]:
        """Configurations from the root down to `index`."""
        path = []
        while index >= 0:
            path.append(self.configs[index])
            index = self.parents[index]
        path.reverse()
        return path


def edge_valid(qa: Sequence[float], qb: Sequence[float], mode: Mode, scene: Scene,
               check_resolution: float = MP_CHECK_RESOLUTION,
               free: Optional[FreeSpace] = None) -> bool:
    """True iff every point along qa-qb at spacing `check_resolution` is collision-free."""
    free = free or FreeSpace(scene, mode)
    return all(free.contains(q) for q in discretize(scene.arm, qa, qb, check_resolution))


def _segment(arm: ArmModel, qa: Config, qb: Config, step: float) -> List[Config]:
    count = max(1, math.ceil(config_distance(arm, qa, qb) / step))
    return [qa] + [interpolate(arm, qa, qb, k / count) for k in range(1, count)] + [qb]


def _extend(tree: _Tree, target: Config, free: FreeSpace, cfg: MPConfig) -> Tuple[Status, int]:
    arm = tree.arm
    near = tree.nearest(target)
    q_near = tree.configs[near]
    distance = config_distance(arm, q_near, target)
    if distance <= cfg.step:
        q_new, status = target, Status.REACHED
    else:
        q_new, status = interpolate(arm, q_near, target, cfg.step / distance), Status.ADVANCED
    if not all(free.contains(q) for q in discretize(arm, q_near, q_new, cfg.check_resolution)):
        return Status.TRAPPED, near
    return status, tree.add(q_new, near)


def _connect(tree: _Tree, target: Config, free: FreeSpace, cfg: MPConfig) -> Tuple[Status, int]:
    status, index = Status.ADVANCED, -1
    while status == Status.ADVANCED:
        status, index = _extend(tree, target, free, cfg)
    return status, index


def plan_motion(q_start: Sequence[float],
                q_goal: Sequence[float],
                mode: Mode,
                scene: Scene,
                cfg: Optional[MPConfig] = None,
                rng: Optional[np.random.Generator] = None,
                stats: Optional[Counter] = None) -> Trajectory:
    """
    Plan a collision-free path from q_start to q_goal with the mode held fixed.

    Raises StartInCollisionError / GoalInCollisionError before any search, and
    IterationsExhaustedError when the trees fail to meet.
    """
    cfg = cfg or MPConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    arm = scene.arm
    q_start, q_goal = tuple(q_start), tuple(q_goal)
    if stats is not None:
        stats["mp_calls"] += 1
    free = FreeSpace(scene, mode, stats=stats)

    if not free.contains(q_start):
        raise StartInCollisionError(f"Start configuration {q_start} is in collision")
    if q_start == q_goal:
        return Trajectory((q_start,), mode)
    if not free.contains(q_goal):
        raise GoalInCollisionError(f"Goal configuration {q_goal} is in collision")

    if edge_valid(q_start, q_goal, mode, scene, cfg.check_resolution, free):
        return Trajectory(tuple(_segment(arm, q_start, q_goal, cfg.step)), mode)

    start_tree, goal_tree = _Tree(arm, q_start), _Tree(arm, q_goal)
    tree_a, tree_b = start_tree, goal_tree
    for iteration in range(cfg.max_iterations):
        q_rand = arm.random_config(rng)
        status, index_a = _extend(tree_a, q_rand, free, cfg)
        if status != Status.TRAPPED:
            q_new = tree_a.configs[index_a]
            status_b, index_b = _connect(tree_b, q_new, free, cfg)
            if status_b == Status.REACHED:
                if tree_a is start_tree:
                    head, tail = start_tree.branch(index_a), goal_tree.branch(index_b)
                else:
                    head, tail = start_tree.branch(index_b), goal_tree.branch(index_a)
                waypoints = head + tail[::-1][1:]
                logger.debug(f"RRT-Connect met after {iteration + 1} iterations, {len(waypoints)} waypoints")
                return Trajectory(tuple(waypoints), mode)
        tree_a, tree_b = tree_b, tree_a

    raise IterationsExhaustedError(
        f"RRT-Connect exhausted {cfg.max_iterations} iterations "
        f"({len(start_tree)} + {len(goal_tree)} nodes)"
    )
