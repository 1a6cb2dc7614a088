import dataclasses

import pytest

from reachtamp.config import DIRECT_PLAN_ATTEMPTS
from reachtamp.domains import bundle as bundle_module, nonmonotonic
from reachtamp.domains.blocktower import PLATES, build_blocktower
from reachtamp.domains.bundle import (
    GOAL_FILE,
    PROBLEM_FILE,
    SCENE_FILE,
    build_instance,
    load_bundle,
    load_solution,
    verify_instance,
    write_bundle,
    write_solution,
)
from reachtamp.domains.kitchen import build_kitchen, check_kitchen_tightness
from reachtamp.domains.nonmonotonic import (
    build_nonmonotonic,
    check_occlusion,
    colored_blocks,
    direct_plan_success_rate,
)
from reachtamp.domains.validator import validate_solution
from reachtamp.geometry.pose import Pose2
from reachtamp.motion.rrt_connect import Trajectory
from reachtamp.symbolic.planner import BREADTH_FIRST, task_plan
from reachtamp.tamp.modes import Attachment
from reachtamp.tamp.params import SearchParams
from reachtamp.tamp.planner import solve
from reachtamp.tamp.state import HybridState
from reachtamp.tamp.trees import ActionEdge, Solution, TransitionEdge
from reachtamp.utils.exceptions import FileFormatError, ValidationError


class TestKitchen:
    def test_layout(self):
        instance = build_kitchen(3, 0)
        scene = instance.scene
        assert scene.movables == ("f1", "f2", "f3")
        assert scene.body("sink").region.width == pytest.approx(3 * 0.06 * 1.1)
        assert scene.body("stove").region.width == pytest.approx(3 * 0.06 * 1.1)
        assert len(instance.domain.schemas) == 4
        assert {s.name for s in instance.domain.geometric_schemas} == {"pick", "place"}
        assert {s.name for s in instance.domain.non_geometric_schemas} == {"wash", "cook"}
        assert instance.id == "kitchen-3-s0"

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_sink_is_tight(self, m):
        assert check_kitchen_tightness(build_kitchen(m, 0))

    def test_loose_sink_is_not_tight(self):
        assert not check_kitchen_tightness(build_kitchen(2, 0, margin=1.5, self_check=False))
        with pytest.raises(ValidationError, match="sink admits more than 2 blocks"):
            build_kitchen(2, 0, margin=1.5)

    def test_range(self):
        with pytest.raises(ValidationError):
            build_kitchen(0, 0)
        with pytest.raises(ValidationError):
            build_kitchen(7, 0)

    def test_seeded(self):
        assert build_kitchen(2, 5).x_init == build_kitchen(2, 5).x_init
        assert build_kitchen(2, 5).x_init != build_kitchen(2, 6).x_init

    def test_shortest_plan(self):
        instance = build_kitchen(2, 0)
        plan = task_plan(instance.ground, instance.x_init.s, instance.goal, strategy=BREADTH_FIRST)
        assert len(plan) == 12


class TestNonmonotonic:
    def test_layout(self):
        instance = build_nonmonotonic(2, 0)
        assert colored_blocks(instance) == ["c1", "c2"]
        assert len(instance.scene.movables) == 4
        assert len(instance.goal.goal_attachments) == 2
        plan = task_plan(instance.ground, instance.x_init.s, instance.goal, strategy=BREADTH_FIRST)
        # the symbolic model does not see the blockers
        assert len(plan) == 4

    @pytest.mark.parametrize("m", [1, 2])
    def test_blockers_occlude(self, m):
        assert check_occlusion(build_nonmonotonic(m, 0))

    def test_range(self):
        with pytest.raises(ValidationError, match="one cubby on each side"):
            build_nonmonotonic(3, 0)

    def test_builder_rejects_reachable_blocks(self, monkeypatch):
        monkeypatch.setattr(nonmonotonic, "check_occlusion", lambda instance, rng=None: False)
        nonmonotonic._layout_occluded.cache_clear()
        try:
            with pytest.raises(ValidationError, match="reachable past its blocker"):
                build_nonmonotonic(1, 0)
            assert colored_blocks(build_nonmonotonic(1, 0, self_check=False)) == ["c1"]
        finally:
            nonmonotonic._layout_occluded.cache_clear()

    def test_verify_rejects_a_working_direct_plan(self, monkeypatch):
        instance = build_nonmonotonic(1, 0)
        monkeypatch.setattr(bundle_module, "direct_plan_success_rate", lambda instance, attempts: 0.02)
        with pytest.raises(ValidationError, match="ignoring the blockers"):
            verify_instance(instance)

    @pytest.mark.slow
    def test_direct_plan_never_works(self):
        instance = build_nonmonotonic(1, 0)
        assert direct_plan_success_rate(instance, attempts=10) == 0.0
        verify_instance(instance, attempts=DIRECT_PLAN_ATTEMPTS)


class TestBlocktower:
    def test_goal_tower(self):
        instance = build_blocktower(4, 3)
        goal = instance.goal
        assert len([a for a in goal.atoms if a.is_attachment]) == 4
        parents = {a.movable: a.parent for a in goal.goal_attachments.values()}
        assert parents == {"b1": "b2", "b2": "b3", "b3": "b4", "b4": "center"}
        assert all(a.transform.x == 0.0 for a in goal.goal_attachments.values())
        assert set(PLATES) <= set(instance.scene.statics)

    def test_seeded(self):
        assert build_blocktower(4, 3).x_init == build_blocktower(4, 3).x_init

    def test_initial_stacks_leave_center_clear(self):
        instance = build_blocktower(5, 1)
        assert all(a.parent != "center" for a in instance.x_init.sigma)

    def test_range(self):
        with pytest.raises(ValidationError):
            build_blocktower(1, 0)


class TestBundle:
    def test_round_trip(self, kitchen1, tmp_path):
        directory = write_bundle(kitchen1, tmp_path / "bundle")
        loaded = load_bundle(directory)
        assert loaded.id == kitchen1.id
        assert loaded.x_init == kitchen1.x_init
        assert loaded.goal == kitchen1.goal
        assert loaded.scene.bodies == kitchen1.scene.bodies
        assert loaded.scene.static_poses == kitchen1.scene.static_poses

    def test_goal_attachments_survive(self, tmp_path):
        instance = build_blocktower(3, 2)
        loaded = load_bundle(write_bundle(instance, tmp_path))
        assert loaded.goal == instance.goal

    def test_missing_part(self, kitchen1, tmp_path):
        directory = write_bundle(kitchen1, tmp_path)
        (directory / PROBLEM_FILE).unlink()
        with pytest.raises(FileFormatError):
            load_bundle(directory)

    def test_goal_disagrees_with_problem(self, kitchen1, tmp_path):
        directory = write_bundle(kitchen1, tmp_path)
        goal = directory / GOAL_FILE
        goal.write_text(goal.read_text(encoding="utf-8").replace("cooked", "clean"), encoding="utf-8")
        with pytest.raises(FileFormatError):
            load_bundle(directory)

    def test_scene_without_initial_state(self, kitchen1, tmp_path):
        directory = write_bundle(kitchen1, tmp_path)
        scene = directory / SCENE_FILE
        scene.write_text(scene.read_text(encoding="utf-8").replace('"initial_attachments"', '"ignored"'),
                         encoding="utf-8")
        with pytest.raises(FileFormatError):
            load_bundle(directory)

    def test_build_by_alias(self):
        assert build_instance("nonmon", 1, 4).id == "nonmonotonic-1-s4"
        with pytest.raises(ValidationError):
            build_instance("sokoban", 1, 0)

    def test_unknown_action_in_solution(self, kitchen1, tmp_path):
        path = tmp_path / "solution.json"
        path.write_text('{"instance": "kitchen-1-s0", "steps": [{"kind": "action", "action": "(fly f1)"}]}',
                        encoding="utf-8")
        with pytest.raises(FileFormatError):
            load_solution(path, kitchen1)


def _teleport(solution: Solution, arm) -> Solution:
    """Move the second waypoint of the first real trajectory by a full radian."""
    for k, edge in enumerate(solution.edges):
        if not isinstance(edge, ActionEdge) and len(edge.trajectory) >= 2:
            break
    else:
        raise AssertionError("solution has no trajectory to tamper with")
    waypoints = list(edge.trajectory.waypoints)
    q = waypoints[1]
    waypoints[1] = arm.normalize((q[0] + 1.0,) + tuple(q[1:]))
    edges = list(solution.edges)
    edges[k] = dataclasses.replace(edge, trajectory=Trajectory(tuple(waypoints), edge.trajectory.mode))
    return Solution(list(solution.states), edges)


def _shift_final_placement(solution: Solution, movable: str, offset: float) -> Solution:
    """Re-place `movable` at its last transition `offset` further along, keeping later steps consistent."""
    k = max(i for i, e in enumerate(solution.edges)
            if isinstance(e, TransitionEdge) and e.attachment.movable == movable)
    old = solution.edges[k].attachment
    shifted = Attachment(old.movable, old.parent, old.transform @ Pose2(offset, 0.0))

    states = list(solution.states[:k + 1])
    for x in solution.states[k + 1:]:
        states.append(HybridState(x.s, x.sigma.replace(shifted), x.q))
    edges = list(solution.edges[:k]) + [dataclasses.replace(solution.edges[k], attachment=shifted)]
    for j in range(k + 1, len(solution.edges)):
        edge = solution.edges[j]
        if not isinstance(edge, ActionEdge):
            edge = dataclasses.replace(edge, trajectory=Trajectory(edge.trajectory.waypoints, states[j].sigma))
        edges.append(edge)
    return Solution(states, edges)


@pytest.fixture(scope="module")
def kitchen_solution():
    instance = build_kitchen(1, 0)
    return instance, solve(instance.x_init, instance.goal, instance.scene, instance.ground,
                           SearchParams(seed=2, timeout=120))


@pytest.fixture(scope="module")
def tower_solution():
    instance = build_blocktower(2, 0)
    return instance, solve(instance.x_init, instance.goal, instance.scene, instance.ground,
                           SearchParams(seed=2, timeout=120))


@pytest.mark.slow
class TestValidator:
    def test_solver_output_is_valid(self, kitchen_solution, tower_solution):
        for instance, solution in (kitchen_solution, tower_solution):
            verdict = validate_solution(instance, solution)
            assert verdict, verdict.violation

    def test_solution_file_round_trip(self, kitchen_solution, tmp_path):
        instance, solution = kitchen_solution
        path = write_solution(tmp_path / "solution.json", instance, solution)
        loaded = load_solution(path, load_bundle(write_bundle(instance, tmp_path / "bundle")))
        assert loaded.states == solution.states
        assert loaded.edges == solution.edges

    def test_teleported_waypoint(self, kitchen_solution):
        instance, solution = kitchen_solution
        verdict = validate_solution(instance, _teleport(solution, instance.scene.arm))
        assert not verdict
        assert verdict.violation.startswith("step-size violation")

    def test_wrong_start(self, kitchen_solution):
        instance, solution = kitchen_solution
        other = build_kitchen(1, 1)
        verdict = validate_solution(other, solution)
        assert not verdict and verdict.step == 0

    def test_stopping_short_of_the_goal(self, kitchen_solution):
        instance, solution = kitchen_solution
        k = max(i for i, e in enumerate(solution.edges) if isinstance(e, ActionEdge))
        verdict = validate_solution(instance, Solution(solution.states[:k + 1], solution.edges[:k]))
        assert not verdict
        assert verdict.violation.startswith("goal atoms missing")

    def test_misplaced_goal_block(self, tower_solution):
        instance, solution = tower_solution
        verdict = validate_solution(instance, _shift_final_placement(solution, "b1", 1e-3))
        assert not verdict
        assert verdict.violation == "goal-attachment mismatch"
        assert verdict.step == len(solution)
