"""
Subgoal sampling layer: goal-candidate generation with rejection, batch
extension of the reachability tree along pi, and reward computation.
"""

import math
import time
from collections import Counter
from typing import List, Optional, Sequence, Tuple

import numpy as np

from reachtamp.geometry.scene import Scene
from reachtamp.motion.rrt_connect import plan_motion
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.model import GroundAction, apply
from reachtamp.tamp.attachments import (
    AttachmentSampler,
    make_goal_candidate,
    make_next_mode,
    sample_batch_attachments,
    sample_transition,
)
from reachtamp.tamp.modes import Attachment
from reachtamp.tamp.params import SearchParams
from reachtamp.tamp.state import HybridState
from reachtamp.tamp.trees import ActionEdge, ARTNode, MotionEdge, ReachabilityTree, TransitionEdge
from reachtamp.utils.exceptions import MotionPlanningError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

Batch = List[Optional[Attachment]]


def goal_reached(x: HybridState, goal: GoalSpec, tolerance: float = 1e-6) -> bool:
    """Goal atoms hold, goal attachments match to `tolerance`, and the goal q if G fixes one."""
    if not goal.atoms <= x.s.atoms:
        return False
    for attachment in goal.goal_attachments.values():
        current = x.sigma.attachment(attachment.movable)
        if current.parent != attachment.parent:
            return False
        if not current.transform.is_close(attachment.transform, tolerance, tolerance):
            return False
    if goal.robot_config is not None:
        if any(abs(math.remainder(a - b, 2 * math.pi)) > tolerance for a, b in zip(x.q, goal.robot_config)):
            return False
    return True


def draw_goal_candidate(pi: Sequence[GroundAction], goal: GoalSpec, x_init: HybridState, scene: Scene,
                        params: SearchParams, rng: np.random.Generator, sampler: AttachmentSampler,
                        stats: Counter) -> Optional[Tuple[HybridState, Batch]]:
    """Up to k_goal batches until one yields a collision-free goal state; a single unchecked draw without rejection."""
    attempts = params.k_goal if params.uses_rejection else 1
    for _ in range(attempts):
        stats["goal_candidates_drawn"] += 1
        alpha = sample_batch_attachments(pi, goal, sampler)
        if alpha is not None:
            candidate = make_goal_candidate(x_init, alpha, pi, goal, scene, rng,
                                            check=params.uses_rejection, stats=stats)
            if candidate is not None:
                return candidate, alpha
        stats["goal_candidates_rejected"] += 1
    return None


def ss_layer(pi: Sequence[GroundAction],
             n_s: Sequence[ARTNode],
             goal: GoalSpec,
             rt: ReachabilityTree,
             scene: Scene,
             params: SearchParams,
             rng: np.random.Generator,
             sampler: AttachmentSampler,
             stats: Optional[Counter] = None,
             deadline: Optional[float] = None) -> List[float]:
    """
    Extend the reachability tree along pi and return the rewards it earned.

    A failure at step i pushes (i - 1) / |pi| and the loop carries on with
    parents from earlier batches. When the last step succeeds, the goal
    connection is attempted: success stores the solution and pushes 1.0.
    """
    stats = stats if stats is not None else Counter()
    rewards: List[float] = []
    if len(n_s) != len(pi) + 1:
        raise ValueError(f"Node sequence of length {len(n_s)} does not match a plan of length {len(pi)}")

    drawn = draw_goal_candidate(pi, goal, rt.root.state, scene, params, rng, sampler, stats)
    if drawn is None:
        logger.debug(f"All goal candidates rejected for a plan of length {len(pi)}")
        return rewards
    x_goal, alpha = drawn

    length = len(pi)
    last: Optional[int] = None
    if length == 0:
        parents = n_s[0].rt_nodes
        last = parents[int(rng.integers(len(parents)))]
    for i in range(1, length + 1):
        if deadline is not None and time.monotonic() > deadline:
            return rewards
        parents = n_s[i - 1].rt_nodes
        if not parents:
            last = None
            break
        parent_id = parents[int(rng.integers(len(parents)))]
        x = rt[parent_id].state
        action = pi[i - 1]
        s_next = apply(x.s, action)

        if not action.is_geometric:
            last = rt.add(parent_id, HybridState(s_next, x.sigma, x.q), ActionEdge(action))
            n_s[i].register(rt, last)
            continue

        attachment = alpha[i - 1]
        sigma_next = make_next_mode(x.sigma, attachment)
        q_next = sample_transition(x.sigma, sigma_next, scene, rng, q_seed=x.q, stats=stats)
        if q_next is None:
            stats["transition_failures"] += 1
            rewards.append((i - 1) / length)
            last = None
            continue
        try:
            trajectory = plan_motion(x.q, q_next, x.sigma, scene, params.mp, rng, stats)
        except MotionPlanningError as e:
            logger.debug(f"Step {i}/{length} {action}: {e}")
            rewards.append((i - 1) / length)
            last = None
            continue
        last = rt.add(parent_id, HybridState(s_next, sigma_next, q_next),
                      TransitionEdge(action, attachment, trajectory))
        n_s[i].register(rt, last)

    if last is None:
        return rewards

    x_last = rt[last].state
    reached = HybridState(x_last.s, x_last.sigma, x_goal.q)
    partial = params.full_extension_value(length)
    if not goal_reached(reached, goal):
        logger.debug(f"Plan fully extended but its end state misses the goal; reward {partial}")
        rewards.append(partial)
        return rewards
    try:
        trajectory = plan_motion(x_last.q, x_goal.q, x_last.sigma, scene, params.mp, rng, stats)
    except MotionPlanningError as e:
        logger.info(f"Goal connection failed after full extension ({e}); reward {partial}")
        rewards.append(partial)
        return rewards

    rt.solution = rt.add(last, reached, MotionEdge(trajectory))
    logger.info(f"Solution found: RT node {rt.solution}, plan length {length}")
    rewards.append(1.0)
    return rewards
