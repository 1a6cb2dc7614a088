"""
Attachment batch sampling, goal candidates and mode-transition configurations.
"""

from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from reachtamp.config import ATTACHMENT_DRAWS, GOAL_CONFIG_TRIES, TRANSITION_SEEDS
from reachtamp.geometry.arm import Config, ik
from reachtamp.geometry.pose import Pose2
from reachtamp.geometry.scene import (
    FreeSpace,
    Scene,
    contact_target,
    placement_range,
    placement_transform,
    world_pose,
)
from reachtamp.geometry.shapes import PlacedShape, collide_placed
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.model import ATTACHED, ROBOT, Atom, GroundAction, apply
from reachtamp.tamp.modes import Attachment, Mode
from reachtamp.tamp.state import HybridState
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

PORT_PROBE_RESTARTS = 3


def make_next_mode(sigma: Mode, alpha: Attachment) -> Mode:
    return sigma.replace(alpha)


class AttachmentSampler:
    """
    Samples one attachment per geometric action.

    Grasps pick a grasp port, preferring ports the arm can reach without
    collision at the object's initial pose. Placements draw a uniform offset
    inside the parent's region and reject overlaps with static bodies.
    """

    def __init__(self, scene: Scene, x_init: HybridState, rng: np.random.Generator,
                 stats: Optional[Counter] = None, draws: int = ATTACHMENT_DRAWS):
        self.scene = scene
        self.x_init = x_init
        self.rng = rng
        self.stats = stats if stats is not None else Counter()
        self.draws = draws
        self._ports: Dict[str, Tuple[Pose2, ...]] = {}

    def preferred_ports(self, movable: str) -> Tuple[Pose2, ...]:
        ports = self._ports.get(movable)
        if ports is not None:
            return ports
        body = self.scene.body(movable)
        obj = world_pose(self.x_init.sigma, self.scene, self.x_init.q, movable)
        free = FreeSpace(self.scene, self.x_init.sigma, stats=self.stats)
        reachable = []
        for port in body.grasp_ports:
            q = ik(self.scene.arm, obj @ port, self.x_init.q, self.rng, restarts=PORT_PROBE_RESTARTS)
            if q is not None and free.contains(q):
                reachable.append(port)
        ports = tuple(reachable) or body.grasp_ports
        logger.debug(f"{movable}: {len(reachable)}/{len(body.grasp_ports)} grasp ports reachable initially")
        self._ports[movable] = ports
        return ports

    def sample_grasp(self, movable: str) -> Attachment:
        ports = self.preferred_ports(movable)
        port = ports[int(self.rng.integers(len(ports)))]
        return Attachment(movable, ROBOT, port.inverse())

    def sample_placement(self, movable: str, parent: str) -> Optional[Attachment]:
        body = self.scene.body(movable)
        support = self.scene.body(parent)
        bounds = placement_range(support, body.shape)
        if bounds is None:
            return None
        lo, hi = bounds
        for _ in range(self.draws):
            u = lo if hi - lo < 1e-12 else float(self.rng.uniform(lo, hi))
            transform = placement_transform(support, body.shape, u)
            if support.movable:
                return Attachment(movable, parent, transform)
            placed = PlacedShape(body.shape, self.scene.static_poses[parent] @ transform)
            if any(collide_placed(placed, other)
                   for other_id, other in self.scene.static_placed.items() if other_id != parent):
                continue
            return Attachment(movable, parent, transform)
        self.stats["attachment_draws_exhausted"] += 1
        return None

    def sample(self, action: GroundAction) -> Optional[Attachment]:
        movable, parent = action.attachment_change
        if parent == ROBOT:
            return self.sample_grasp(movable)
        return self.sample_placement(movable, parent)


def sample_batch_attachments(pi: Sequence[GroundAction], goal: GoalSpec,
                             sampler: AttachmentSampler) -> Optional[List[Optional[Attachment]]]:
    """
    One attachment per geometric action of pi (None for non-geometric ones),
    assigned by a reverse scan: the last geometric action on a movable takes
    the goal attachment when G names one. Returns None if a draw is exhausted.
    """
    undecided = set(sampler.scene.movables)
    batch: List[Optional[Attachment]] = [None] * len(pi)
    for i in range(len(pi) - 1, -1, -1):
        action = pi[i]
        if not action.is_geometric:
            continue
        movable, parent = action.attachment_change
        goal_attachment = goal.goal_attachment_for(Atom.of(ATTACHED, movable, parent))
        if movable in undecided and goal_attachment is not None:
            batch[i] = goal_attachment
        else:
            sampled = sampler.sample(action)
            if sampled is None:
                return None
            batch[i] = sampled
        undecided.discard(movable)
    return batch


def make_goal_candidate(x_init: HybridState,
                        alpha: Sequence[Optional[Attachment]],
                        pi: Sequence[GroundAction],
                        goal: GoalSpec,
                        scene: Scene,
                        rng: np.random.Generator,
                        check: bool = True,
                        stats: Optional[Counter] = None,
                        tries: int = GOAL_CONFIG_TRIES) -> Optional[HybridState]:
    """
    Hybrid goal state reached by applying pi with attachments alpha.

    With `check`, the candidate is rejected (None) when no collision-free q_G
    is found; without it the state is built blind.
    """
    s = x_init.s
    sigma = x_init.sigma
    for action, attachment in zip(pi, alpha):
        s = apply(s, action)
        if attachment is not None:
            sigma = make_next_mode(sigma, attachment)

    free = FreeSpace(scene, sigma, stats=stats) if check else None
    if goal.robot_config is not None:
        q_goal = tuple(goal.robot_config)
        if free is not None and not free.contains(q_goal):
            return None
        return HybridState(s, sigma, q_goal)

    if free is None:
        return HybridState(s, sigma, scene.arm.random_config(rng))
    if not free.fixed_ok:
        return None
    for _ in range(tries):
        q_goal = scene.arm.random_config(rng)
        if free.contains(q_goal):
            return HybridState(s, sigma, q_goal)
    return None


def sample_transition(sigma: Mode, sigma_next: Mode, scene: Scene, rng: np.random.Generator,
                      q_seed: Optional[Config] = None, stats: Optional[Counter] = None,
                      seeds: int = TRANSITION_SEEDS) -> Optional[Config]:
    """
    Configuration at the grasp/place switch from sigma to sigma_next,
    collision-free in both modes. The first IK seed is `q_seed` when given.
    """
    _, target = contact_target(sigma, sigma_next, scene)
    arm = scene.arm
    if target.position_error(arm.base) > arm.reach:
        return None
    before = FreeSpace(scene, sigma, stats=stats)
    after = FreeSpace(scene, sigma_next, stats=stats)
    if not (before.fixed_ok and after.fixed_ok):
        return None
    for k in range(seeds):
        seed = q_seed if k == 0 and q_seed is not None else arm.random_config(rng)
        q = ik(arm, target, seed, rng, restarts=0)
        if q is not None and before.contains(q) and after.contains(q):
            return q
    return None
