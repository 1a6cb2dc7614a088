"""
Independent replay of a solution: abstract transitions, trajectories at half
the planner's check resolution, mode switches and the final goal.
"""

from dataclasses import dataclass
from typing import Optional

from reachtamp.config import MP_CHECK_RESOLUTION, MP_STEP
from reachtamp.domains.common import BenchmarkInstance
from reachtamp.geometry.arm import fk
from reachtamp.geometry.scene import FreeSpace, contact_target
from reachtamp.motion.metric import config_distance, discretize
from reachtamp.motion.rrt_connect import Trajectory
from reachtamp.symbolic.model import applicable, successor
from reachtamp.tamp.modes import Mode
from reachtamp.tamp.ss_layer import goal_reached
from reachtamp.tamp.state import HybridState
from reachtamp.tamp.trees import ActionEdge, MotionEdge, Solution, TransitionEdge
from reachtamp.utils.exceptions import GeometryError, TransitionContractError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

CONTACT_POSITION_TOLERANCE = 2e-3
CONTACT_ANGLE_TOLERANCE = 2e-3
GOAL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Verdict:
    valid: bool
    violation: Optional[str] = None
    step: Optional[int] = None

    def __bool__(self) -> bool:
        return self.valid


class _Invalid(Exception):
    pass


def _check_trajectory(trajectory: Trajectory, x: HybridState, instance: BenchmarkInstance,
                      step: float, resolution: float) -> None:
    arm = instance.scene.arm
    if trajectory.mode != x.sigma:
        raise _Invalid("trajectory planned in a different mode")
    if trajectory.start != x.q:
        raise _Invalid("trajectory does not start at the current configuration")
    free = FreeSpace(instance.scene, x.sigma)
    for q in trajectory.waypoints:
        if not arm.within_limits(q):
            raise _Invalid(f"waypoint {q} violates joint limits")
    for qa, qb in zip(trajectory.waypoints, trajectory.waypoints[1:]):
        if config_distance(arm, qa, qb) > step + 1e-9:
            raise _Invalid(f"step-size violation: {config_distance(arm, qa, qb):.4f} > {step}")
        for q in discretize(arm, qa, qb, resolution):
            if not free.contains(q):
                raise _Invalid(f"collision along trajectory at {q}")
    if len(trajectory.waypoints) == 1 and not free.contains(trajectory.start):
        raise _Invalid("single-waypoint trajectory in collision")


def _check_switch(x: HybridState, sigma_next: Mode, q: tuple, instance: BenchmarkInstance) -> None:
    scene = instance.scene
    try:
        _, target = contact_target(x.sigma, sigma_next, scene)
    except (TransitionContractError, GeometryError) as e:
        raise _Invalid(f"invalid mode transition: {e}") from e
    ee = fk(scene.arm, q).ee
    if (ee.position_error(target) > CONTACT_POSITION_TOLERANCE
            or ee.angle_error(target) > CONTACT_ANGLE_TOLERANCE):
        raise _Invalid(f"end-effector {ee.as_tuple()} misses the contact pose {target.as_tuple()}")
    if not FreeSpace(scene, x.sigma).contains(q):
        raise _Invalid("switch configuration in collision before the transition")
    if not FreeSpace(scene, sigma_next).contains(q):
        raise _Invalid("switch configuration in collision after the transition")


def validate_solution(instance: BenchmarkInstance, solution: Solution,
                      step: float = MP_STEP, resolution: float = MP_CHECK_RESOLUTION) -> Verdict:
    """
    Replay a solution against the instance.

    Returns:
        Verdict: valid, or the first violation and the edge index where it occurred
    """
    half = resolution / 2
    states, edges = solution.states, solution.edges
    if len(states) != len(edges) + 1:
        return Verdict(False, "states and edges are misaligned")
    if states[0] != instance.x_init:
        return Verdict(False, "solution does not start at the initial state", 0)

    for k, edge in enumerate(edges):
        x, nxt = states[k], states[k + 1]
        try:
            if not nxt.consistent:
                raise _Invalid("abstract attachments disagree with the mode")
            if isinstance(edge, ActionEdge):
                if edge.action.is_geometric:
                    raise _Invalid(f"geometric action {edge.action} without a trajectory")
                if not applicable(x.s, edge.action):
                    raise _Invalid(f"{edge.action} not applicable")
                if nxt.s != successor(x.s, edge.action) or nxt.sigma != x.sigma or nxt.q != x.q:
                    raise _Invalid("non-geometric transition changed more than the abstract state")
            elif isinstance(edge, TransitionEdge):
                action = edge.action
                if not action.is_geometric:
                    raise _Invalid(f"non-geometric action {action} recorded with a trajectory")
                if not applicable(x.s, action):
                    raise _Invalid(f"{action} not applicable")
                if action.attachment_change != edge.attachment.pair:
                    raise _Invalid(f"attachment {edge.attachment.pair} does not match {action}")
                if nxt.s != successor(x.s, action):
                    raise _Invalid("abstract state does not follow the action")
                sigma_next = x.sigma.replace(edge.attachment)
                if nxt.sigma != sigma_next:
                    raise _Invalid("mode does not follow the recorded attachment")
                _check_trajectory(edge.trajectory, x, instance, step, half)
                if edge.trajectory.end != nxt.q:
                    raise _Invalid("trajectory does not end at the switch configuration")
                _check_switch(x, sigma_next, nxt.q, instance)
            elif isinstance(edge, MotionEdge):
                if nxt.s != x.s or nxt.sigma != x.sigma:
                    raise _Invalid("motion edge changed the abstract state or mode")
                _check_trajectory(edge.trajectory, x, instance, step, half)
                if edge.trajectory.end != nxt.q:
                    raise _Invalid("trajectory does not end at the next configuration")
            else:
                raise _Invalid(f"unknown edge type {type(edge).__name__}")
        except _Invalid as e:
            logger.info(f"{instance.id}: edge {k} invalid: {e}")
            return Verdict(False, str(e), k)

    final = states[-1]
    if not instance.goal.atoms <= final.s.atoms:
        missing = sorted(str(a) for a in instance.goal.atoms - final.s.atoms)
        return Verdict(False, f"goal atoms missing: {', '.join(missing)}", len(edges))
    if not goal_reached(final, instance.goal, GOAL_TOLERANCE):
        return Verdict(False, "goal-attachment mismatch", len(edges))
    return Verdict(True)
