"""
Shared pieces of the benchmark generators.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Tuple

from reachtamp.geometry.arm import ArmModel
from reachtamp.geometry.pose import Pose2
from reachtamp.geometry.scene import Body, Region, Scene, placement_transform, state_collision_free
from reachtamp.geometry.shapes import Polygon
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.grounding import GroundProblem, ground
from reachtamp.symbolic.model import DomainModel, ProblemModel
from reachtamp.symbolic.parser import parse_domain, parse_problem
from reachtamp.symbolic.planner import task_plan
from reachtamp.tamp.modes import Attachment, Mode
from reachtamp.tamp.state import HybridState
from reachtamp.utils.exceptions import InfeasibleGoalError, TaskPlanningError, ValidationError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

SURFACE_TOP = -0.3
SURFACE_THICKNESS = 0.04
BLOCK_SIZE = 0.06
HOME_CONFIG = (math.pi / 2, -math.pi / 2, -math.pi / 2)


def instance_id(name: str, m: int, seed: int) -> str:
    return f"{name}-{m}-s{seed}"


@dataclass(frozen=True, eq=False)
class BenchmarkInstance:
    name: str
    m: int
    seed: int
    domain_text: str
    problem_text: str
    scene: Scene
    x_init: HybridState
    goal: GoalSpec

    @property
    def id(self) -> str:
        return instance_id(self.name, self.m, self.seed)

    @cached_property
    def domain(self) -> DomainModel:
        return parse_domain(self.domain_text)

    @cached_property
    def problem(self) -> ProblemModel:
        return parse_problem(self.problem_text, self.domain)

    @cached_property
    def ground(self) -> GroundProblem:
        return ground(self.domain, self.problem)


def surface(body_id: str, x_min: float, x_max: float, top: float = SURFACE_TOP,
            thickness: float = SURFACE_THICKNESS) -> Tuple[Body, Pose2]:
    """Static slab whose whole top face is a placement region."""
    width = x_max - x_min
    shape = Polygon.box(width, thickness)
    region = Region(-width / 2, width / 2, thickness / 2)
    return Body(body_id, shape, movable=False, region=region), Pose2((x_min + x_max) / 2, top - thickness / 2)


def obstacle(body_id: str, x_min: float, x_max: float, y_min: float, y_max: float) -> Tuple[Body, Pose2]:
    shape = Polygon.box(x_max - x_min, y_max - y_min)
    return Body(body_id, shape, movable=False), Pose2((x_min + x_max) / 2, (y_min + y_max) / 2)


def block(body_id: str, width: float = BLOCK_SIZE, height: float = BLOCK_SIZE) -> Body:
    """Movable box carrying a region on its top face for stacking."""
    return Body(body_id, Polygon.box(width, height), movable=True,
                region=Region(-width / 2, width / 2, height / 2))


def resting(child: Body, parent: Body, u: float) -> Attachment:
    return Attachment(child.id, parent.id, placement_transform(parent, child.shape, u))


def make_scene(static: Iterable[Tuple[Body, Pose2]], movables: Iterable[Body]) -> Scene:
    bodies: Dict[str, Body] = {}
    poses: Dict[str, Pose2] = {}
    for body, pose in static:
        bodies[body.id] = body
        poses[body.id] = pose
    for body in movables:
        bodies[body.id] = body
    return Scene(ArmModel(), bodies, poses)


def pddl_problem(name: str, domain: str, objects: Dict[str, List[str]], init: Iterable[str],
                 goal: Iterable[str]) -> str:
    object_lines = "\n".join(f"    {' '.join(names)} - {type_name}" for type_name, names in objects.items() if names)
    init_lines = "\n".join(f"    {atom}" for atom in init)
    goal_lines = "\n".join(f"      {atom}" for atom in goal)
    return (
        f"(define (problem {name})\n"
        f"  (:domain {domain})\n"
        f"  (:objects\n{object_lines})\n"
        f"  (:init\n{init_lines})\n"
        f"  (:goal (and\n{goal_lines})))\n"
    )


def finish_instance(name: str, m: int, seed: int, domain_text: str, problem_text: str,
                    scene: Scene, attachments: Iterable[Attachment],
                    goal_attachments: Iterable[Attachment] = ()) -> BenchmarkInstance:
    """Assemble an instance and run the generation-time checks shared by every family."""
    domain = parse_domain(domain_text)
    problem = parse_problem(problem_text, domain)
    sigma = Mode.of(attachments)
    x_init = HybridState(problem.init, sigma, HOME_CONFIG)
    x_init.check_consistency()
    if set(sigma.movables) != set(scene.movables):
        raise ValidationError("Initial mode does not cover every movable")
    if not state_collision_free(scene, sigma, HOME_CONFIG):
        raise ValidationError(f"{name}-{m}: initial state is in collision")
    goal = GoalSpec.of(problem.goal, goal_attachments)

    instance = BenchmarkInstance(name, m, seed, domain_text, problem_text, scene, x_init, goal)
    try:
        plan = task_plan(instance.ground, x_init.s, goal)
    except TaskPlanningError as e:
        raise InfeasibleGoalError(f"{instance.id} is not abstractly solvable: {e}") from e
    logger.info(f"Generated {instance.id}: {len(scene.movables)} movables, abstract plan length {len(plan)}")
    return instance
