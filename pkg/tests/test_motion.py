import math
from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from reachtamp.domains.common import make_scene, obstacle
from reachtamp.geometry.arm import ArmModel
from reachtamp.geometry.scene import FreeSpace
from reachtamp.motion.metric import config_difference, config_distance, discretize, interpolate
from reachtamp.motion.rrt_connect import MPConfig, edge_valid, plan_motion
from reachtamp.tamp.modes import Mode
from reachtamp.utils.exceptions import GoalInCollisionError, IterationsExhaustedError, StartInCollisionError

# arm swinging up over the post is free, straight through it is not
ABOVE = (0.6, 0.0, 0.0)
BELOW = (-0.6, 0.0, 0.0)


@pytest.fixture
def post_scene():
    return make_scene([obstacle("post", 1.5, 1.7, -0.6, 0.6)], []), Mode.of([])


def _assert_valid(trajectory, q_start, q_goal, scene, cfg):
    arm = scene.arm
    assert trajectory.start == tuple(q_start)
    assert trajectory.end == tuple(q_goal)
    free = FreeSpace(scene, trajectory.mode)
    for qa, qb in zip(trajectory.waypoints, trajectory.waypoints[1:]):
        assert config_distance(arm, qa, qb) <= cfg.step + 1e-9
        assert all(free.contains(q) for q in discretize(arm, qa, qb, cfg.check_resolution / 2))


class TestMetric:
    def test_distance_wraps(self, arm):
        qa = (math.pi - 0.1, 0.0, 0.0)
        qb = (-math.pi + 0.1, 0.0, 0.0)
        assert config_distance(arm, qa, qb) == pytest.approx(0.2)
        assert config_difference(arm, qa, qb)[0] == pytest.approx(0.2)

    def test_bounded_joints_do_not_wrap(self):
        bounded = ArmModel(joint_limits=((-3.0, 3.0),) * 3)
        assert config_distance(bounded, (2.9, 0, 0), (-2.9, 0, 0)) == pytest.approx(5.8)

    def test_interpolate_endpoints_and_wrap(self, arm):
        qa = (math.pi - 0.1, 0.0, 0.0)
        qb = (-math.pi + 0.1, 0.5, 0.0)
        assert interpolate(arm, qa, qb, 0.0) == qa
        assert interpolate(arm, qa, qb, 1.0) == qb
        mid = interpolate(arm, qa, qb, 0.5)
        assert abs(mid[0]) == pytest.approx(math.pi)
        assert mid[1] == pytest.approx(0.25)

    def test_discretize(self, arm):
        points = list(discretize(arm, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 0.1))
        assert len(points) == 11
        assert points[0] == (0.0, 0.0, 0.0)
        assert points[-1] == (1.0, 0.0, 0.0)
        gaps = [config_distance(arm, a, b) for a, b in zip(points, points[1:])]
        assert max(gaps) <= 0.1 + 1e-12

    def test_discretize_single_point(self, arm):
        assert len(list(discretize(arm, (0.2, 0.0, 0.0), (0.2, 0.0, 0.0), 0.1))) == 2


class TestConfig:
    def test_defaults(self):
        cfg = MPConfig()
        assert cfg.step == 0.15
        assert cfg.check_resolution == 0.02
        assert cfg.max_iterations == 3000

    def test_resolution_must_not_exceed_step(self):
        with pytest.raises(PydanticValidationError):
            MPConfig(step=0.1, check_resolution=0.2)
        with pytest.raises(PydanticValidationError):
            MPConfig(step=0.0)


class TestPlanMotion:
    def test_same_start_and_goal(self, table_scene, home):
        scene, mode = table_scene
        trajectory = plan_motion(home, home, mode, scene)
        assert trajectory.waypoints == (home,)

    def test_direct_segment(self, table_scene, home):
        scene, mode = table_scene
        goal = (1.2, -1.0, -1.2)
        stats = Counter()
        cfg = MPConfig()
        trajectory = plan_motion(home, goal, mode, scene, cfg, stats=stats)
        _assert_valid(trajectory, home, goal, scene, cfg)
        assert stats["mp_calls"] == 1
        assert stats["collision_checks"] > 0

    def test_search_around_obstacle(self, post_scene):
        scene, mode = post_scene
        assert not edge_valid(ABOVE, BELOW, mode, scene)
        cfg = MPConfig()
        trajectory = plan_motion(ABOVE, BELOW, mode, scene, cfg, np.random.default_rng(1))
        assert len(trajectory) > 2
        _assert_valid(trajectory, ABOVE, BELOW, scene, cfg)

    def test_start_in_collision(self, post_scene):
        scene, mode = post_scene
        with pytest.raises(StartInCollisionError):
            plan_motion((0.0, 0.0, 0.0), ABOVE, mode, scene)

    def test_goal_in_collision(self, post_scene):
        scene, mode = post_scene
        with pytest.raises(GoalInCollisionError):
            plan_motion(ABOVE, (0.0, 0.0, 0.0), mode, scene)

    def test_iterations_exhausted(self, post_scene):
        scene, mode = post_scene
        with pytest.raises(IterationsExhaustedError):
            plan_motion(ABOVE, BELOW, mode, scene, MPConfig(max_iterations=1), np.random.default_rng(1))
