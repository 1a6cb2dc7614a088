"""
Problem bundles and solution files on disk.

A bundle directory holds domain.pddl, problem.pddl, scene.json (with the
initial mode and robot configuration) and goal.json. A solution file is an
ordered list of edge records replayed from the bundle's initial state.
"""

import json
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError as PydanticValidationError

from reachtamp.config import DIRECT_PLAN_ATTEMPTS
from reachtamp.domains.blocktower import build_blocktower
from reachtamp.domains.common import BenchmarkInstance
from reachtamp.domains.kitchen import build_kitchen
from reachtamp.domains.nonmonotonic import build_nonmonotonic, direct_plan_success_rate
from reachtamp.geometry.scene_io import AttachmentModel, dump_scene, load_scene
from reachtamp.motion.rrt_connect import Trajectory
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.model import successor
from reachtamp.symbolic.parser import parse_domain, parse_problem
from reachtamp.symbolic.planner import parse_plan
from reachtamp.tamp.state import HybridState
from reachtamp.tamp.trees import ActionEdge, Edge, MotionEdge, Solution, TransitionEdge
from reachtamp.utils.exceptions import FileFormatError, ReachTampError, ValidationError
from reachtamp.utils.logging_config import get_logger
from reachtamp.utils.validation import validate_domain_name, validate_movable_count

logger = get_logger(__name__)

DOMAIN_FILE = "domain.pddl"
PROBLEM_FILE = "problem.pddl"
SCENE_FILE = "scene.json"
GOAL_FILE = "goal.json"

BUILDERS: Dict[str, Callable[[int, int], BenchmarkInstance]] = {
    "kitchen": build_kitchen,
    "nonmonotonic": build_nonmonotonic,
    "blocktower": build_blocktower,
}


def build_instance(domain: str, m: int, seed: int) -> BenchmarkInstance:
    """Generate an instance by family name (aliases accepted)."""
    name = validate_domain_name(domain)
    validate_movable_count(name, m)
    return BUILDERS[name](m, seed)


def verify_instance(instance: BenchmarkInstance, attempts: int = DIRECT_PLAN_ATTEMPTS) -> None:
    """
    Generation-time checks run on top of the builders' own. For nonmonotonic,
    the blocker-ignoring shortest plan must fail in every one of `attempts`
    seeded single passes.

    Raises:
        ValidationError: If a check fails
    """
    if instance.name == "nonmonotonic":
        rate = direct_plan_success_rate(instance, attempts=attempts)
        if rate > 0.0:
            raise ValidationError(f"{instance.id}: the plan ignoring the blockers succeeded in "
                                  f"{rate:.0%} of {attempts} attempts")
    logger.info(f"{instance.id}: generation checks passed")


class GoalFile(BaseModel):
    name: str
    m: int
    seed: int
    atoms: List[str]
    goal_attachments: List[AttachmentModel] = Field(default_factory=list)
    robot_config: Optional[Tuple[float, ...]] = None


class StepRecord(BaseModel):
    kind: Literal["action", "transition", "motion"]
    action: Optional[str] = None
    attachment: Optional[AttachmentModel] = None
    trajectory: Optional[List[Tuple[float, ...]]] = None


class SolutionFile(BaseModel):
    instance: str
    steps: List[StepRecord]


def _read_json(path: Path, model):
    try:
        return model.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, PydanticValidationError) as e:
        raise FileFormatError(f"Invalid {path.name}: {e}", str(path)) from e


def write_bundle(instance: BenchmarkInstance, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / DOMAIN_FILE).write_text(instance.domain_text, encoding="utf-8")
    (directory / PROBLEM_FILE).write_text(instance.problem_text, encoding="utf-8")
    dump_scene(directory / SCENE_FILE, instance.scene, instance.x_init.sigma, instance.x_init.q)
    goal = GoalFile(
        name=instance.name,
        m=instance.m,
        seed=instance.seed,
        atoms=[str(a) for a in sorted(instance.goal.atoms)],
        goal_attachments=[AttachmentModel.from_attachment(a)
                          for _, a in sorted(instance.goal.goal_attachments.items())],
        robot_config=instance.goal.robot_config,
    )
    (directory / GOAL_FILE).write_text(goal.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Wrote bundle {instance.id} to {directory}")
    return directory


def load_bundle(directory: Union[str, Path]) -> BenchmarkInstance:
    """
    Rebuild a BenchmarkInstance from a bundle directory.

    Raises:
        FileFormatError: If a file is missing, malformed, or the parts disagree
    """
    directory = Path(directory)
    goal_file = _read_json(directory / GOAL_FILE, GoalFile)
    scene_file = load_scene(directory / SCENE_FILE)
    try:
        domain_text = (directory / DOMAIN_FILE).read_text(encoding="utf-8")
        problem_text = (directory / PROBLEM_FILE).read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"Incomplete bundle: {e}", str(directory)) from e

    try:
        problem = parse_problem(problem_text, parse_domain(domain_text))
        scene = scene_file.to_scene()
        sigma = scene_file.initial_mode()
        if sigma is None or scene_file.initial_config is None:
            raise FileFormatError("scene.json lacks the initial mode or configuration", str(directory / SCENE_FILE))
        x_init = HybridState(problem.init, sigma, tuple(scene_file.initial_config))
        x_init.check_consistency()
        goal = GoalSpec.of(problem.goal, [a.to_attachment() for a in goal_file.goal_attachments],
                           goal_file.robot_config)
    except FileFormatError:
        raise
    except ReachTampError as e:
        raise FileFormatError(f"Inconsistent bundle: {e}", str(directory)) from e

    if sorted(str(a) for a in goal.atoms) != sorted(goal_file.atoms):
        raise FileFormatError("goal.json atoms disagree with problem.pddl", str(directory / GOAL_FILE))
    return BenchmarkInstance(goal_file.name, goal_file.m, goal_file.seed, domain_text, problem_text,
                             scene, x_init, goal)


def _record(edge: Edge) -> StepRecord:
    if isinstance(edge, ActionEdge):
        return StepRecord(kind="action", action=str(edge.action))
    if isinstance(edge, TransitionEdge):
        return StepRecord(kind="transition", action=str(edge.action),
                          attachment=AttachmentModel.from_attachment(edge.attachment),
                          trajectory=list(edge.trajectory.waypoints))
    return StepRecord(kind="motion", trajectory=list(edge.trajectory.waypoints))


def write_solution(path: Union[str, Path], instance: BenchmarkInstance, solution: Solution) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    content = SolutionFile(instance=instance.id, steps=[_record(e) for e in solution.edges])
    path.write_text(content.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_solution(path: Union[str, Path], instance: BenchmarkInstance) -> Solution:
    """
    Rebuild a Solution by replaying its records from the instance's initial state.

    States are reconstructed, not trusted: abstract states follow the
    recorded actions, modes follow the recorded attachments and
    configurations are the trajectory endpoints. Whether the result is a
    valid solution is left to validate_solution.
    """
    path = Path(path)
    content = _read_json(path, SolutionFile)
    if content.instance != instance.id:
        logger.warning(f"Solution {path} was written for {content.instance}, replaying on {instance.id}")

    states = [instance.x_init]
    edges: List[Edge] = []
    for index, record in enumerate(content.steps):
        x = states[-1]
        try:
            if record.kind == "motion":
                waypoints = tuple(tuple(q) for q in record.trajectory or ())
                if not waypoints:
                    raise FileFormatError(f"step {index}: motion without a trajectory", str(path))
                edge = MotionEdge(Trajectory(waypoints, x.sigma))
                nxt = HybridState(x.s, x.sigma, waypoints[-1])
            else:
                if record.action is None:
                    raise FileFormatError(f"step {index}: {record.kind} without an action", str(path))
                (action,) = parse_plan(record.action, instance.ground)
                s_next = successor(x.s, action)
                if record.kind == "action":
                    edge = ActionEdge(action)
                    nxt = HybridState(s_next, x.sigma, x.q)
                else:
                    waypoints = tuple(tuple(q) for q in record.trajectory or ())
                    if record.attachment is None or not waypoints:
                        raise FileFormatError(f"step {index}: transition needs an attachment and a trajectory",
                                              str(path))
                    attachment = record.attachment.to_attachment()
                    edge = TransitionEdge(action, attachment, Trajectory(waypoints, x.sigma))
                    nxt = HybridState(s_next, x.sigma.replace(attachment), waypoints[-1])
        except FileFormatError:
            raise
        except (ReachTampError, ValueError) as e:
            raise FileFormatError(f"step {index}: {e}", str(path)) from e
        edges.append(edge)
        states.append(nxt)
    return Solution(states, edges)
