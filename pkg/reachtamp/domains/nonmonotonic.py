"""
Non-monotonic: each coloured block sits in a cubby (roof above, wall on the
far side) with a taller grey blocker on the side facing the robot. Every
grasp port of a coloured block is unreachable until its blocker is moved,
which the symbolic model does not know.
"""

from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from reachtamp.domains.common import (
    BLOCK_SIZE,
    SURFACE_TOP,
    BenchmarkInstance,
    block,
    finish_instance,
    make_scene,
    obstacle,
    pddl_problem,
    resting,
    surface,
)
from reachtamp.geometry.pose import Pose2
from reachtamp.geometry.scene import Body
from reachtamp.symbolic.model import ROBOT
from reachtamp.symbolic.planner import BREADTH_FIRST, task_plan
from reachtamp.tamp.attachments import AttachmentSampler, sample_transition
from reachtamp.tamp.modes import Attachment
from reachtamp.tamp.params import SearchParams
from reachtamp.tamp.ss_layer import ss_layer
from reachtamp.tamp.trees import AbstractReachabilityTree, ReachabilityTree
from reachtamp.utils.exceptions import ValidationError
from reachtamp.utils.logging_config import get_logger
from reachtamp.utils.validation import validate_movable_count

logger = get_logger(__name__)

NONMONOTONIC_DOMAIN = """
(define (domain nonmonotonic)
  (:requirements :strips :typing :negative-preconditions)
  (:types block surface agent - object
          colored blocker - block)
  (:constants robot - agent)
  (:predicates
    (attached ?b - block ?p - object)
    (handempty))
  (:action pick
    :parameters (?b - block ?s - surface)
    :precondition (and (attached ?b ?s) (handempty))
    :effect (and (attached ?b robot) (not (attached ?b ?s)) (not (handempty))))
  (:action place
    :parameters (?b - block ?s - surface)
    :precondition (and (attached ?b robot))
    :effect (and (attached ?b ?s) (not (attached ?b robot)) (handempty))))
"""

CUBBY_INNER = 0.95          # distance from the base to the blocker-side face of a coloured block
BLOCKER_GAP = 0.015
WALL_GAP = 0.01
ROOF_CLEARANCE = 0.10
BLOCKER_WIDTH = 0.04
BLOCKER_HEIGHT = 0.09
WALL_WIDTH = 0.02
ROOF_THICKNESS = 0.02
STORAGE = (-0.30, -0.08)
PATCHES = ((0.08, 0.17), (0.20, 0.29))


def _cubby(index: int, side: int) -> Tuple[List[Tuple[Body, Pose2]], Body, Body]:
    """
    Static parts plus coloured block and blocker for one cubby. side=+1 puts the
    cubby right of the base (blocker on its left); side=-1 mirrors it.
    """
    w = BLOCK_SIZE
    block_top = SURFACE_TOP + w

    def span(a: float, b: float) -> Tuple[float, float]:
        return (a, b) if side > 0 else (-b, -a)

    inner = CUBBY_INNER
    outer = inner + w
    wall = span(outer + WALL_GAP, outer + WALL_GAP + WALL_WIDTH)
    roof_lo = block_top + ROOF_CLEARANCE
    roof = span(inner - BLOCKER_GAP, outer + WALL_GAP + WALL_WIDTH)
    table = span(inner - 0.15, outer + 0.14)

    static = [
        surface(f"table{index}", *table),
        obstacle(f"wall{index}", wall[0], wall[1], SURFACE_TOP, roof_lo),
        obstacle(f"roof{index}", roof[0], roof[1], roof_lo, roof_lo + ROOF_THICKNESS),
    ]
    return static, block(f"c{index}"), block(f"g{index}", BLOCKER_WIDTH, BLOCKER_HEIGHT)


def build_nonmonotonic(m: int, seed: int, self_check: bool = True) -> BenchmarkInstance:
    """
    m coloured blocks in cubbies, m blockers, goal: each c_i resting centred on patch_i.
    The layout is fixed; the seed only labels the instance. m is capped at 2
    because the base has one cubby on each side. With `self_check` every grasp
    port of every coloured block must be occluded initially.
    """
    validate_movable_count("nonmonotonic", m)
    w = BLOCK_SIZE
    static = [surface("storage", *STORAGE)]
    colored, blockers, attachments, goal_attachments = [], [], [], []
    for i in range(1, m + 1):
        side = 1 if i == 1 else -1
        parts, c, g = _cubby(i, side)
        static.extend(parts)
        table_body, table_pose = parts[0]
        block_center = side * (CUBBY_INNER + w / 2)
        blocker_center = side * (CUBBY_INNER - BLOCKER_GAP - BLOCKER_WIDTH / 2)
        attachments.append(resting(c, table_body, block_center - table_pose.x))
        attachments.append(resting(g, table_body, blocker_center - table_pose.x))

        patch, patch_pose = surface(f"patch{i}", *PATCHES[i - 1])
        static.append((patch, patch_pose))
        goal_attachments.append(resting(c, patch, 0.0))
        colored.append(c)
        blockers.append(g)

    scene = make_scene(static, colored + blockers)
    problem = pddl_problem(
        f"nonmonotonic-{m}", "nonmonotonic",
        {
            "colored": [c.id for c in colored],
            "blocker": [g.id for g in blockers],
            "surface": ["storage"] + [f"table{i}" for i in range(1, m + 1)] + [f"patch{i}" for i in range(1, m + 1)],
        },
        [f"(attached {a.movable} {a.parent})" for a in attachments] + ["(handempty)"],
        [f"(attached c{i} patch{i})" for i in range(1, m + 1)],
    )
    instance = finish_instance("nonmonotonic", m, seed, NONMONOTONIC_DOMAIN, problem, scene,
                               attachments, goal_attachments)
    if self_check and not _layout_occluded(m):
        raise ValidationError(f"{instance.id}: a coloured block is reachable past its blocker")
    return instance


@lru_cache(maxsize=None)
def _layout_occluded(m: int) -> bool:
    # the scene depends on m only
    return check_occlusion(build_nonmonotonic(m, 0, self_check=False), np.random.default_rng(0))


def colored_blocks(instance: BenchmarkInstance) -> List[str]:
    return sorted(o for o, t in instance.problem.objects.items() if t == "colored")


def check_occlusion(instance: BenchmarkInstance, rng: Optional[np.random.Generator] = None) -> bool:
    """True iff no grasp port of any coloured block admits a collision-free switch configuration initially."""
    rng = rng if rng is not None else np.random.default_rng(instance.seed)
    scene = instance.scene
    sigma = instance.x_init.sigma
    for c in colored_blocks(instance):
        for k, port in enumerate(scene.body(c).grasp_ports):
            grasped = sigma.replace(Attachment(c, ROBOT, port.inverse()))
            if sample_transition(sigma, grasped, scene, rng, q_seed=instance.x_init.q) is not None:
                logger.warning(f"{instance.id}: port {k} of {c} is reachable despite its blocker")
                return False
    return True


def direct_plan_success_rate(instance: BenchmarkInstance, attempts: int = 50, seed: int = 0) -> float:
    """
    Fraction of seeded attempts in which the shortest abstract plan is
    realized geometrically in a single subgoal-sampling pass.
    """
    x_init, goal, scene = instance.x_init, instance.goal, instance.scene
    plan = task_plan(instance.ground, x_init.s, goal, strategy=BREADTH_FIRST)
    successes = 0
    for k in range(attempts):
        params = SearchParams(seed=seed + k)
        rng = np.random.default_rng(params.seed)
        rt = ReachabilityTree(x_init)
        art = AbstractReachabilityTree(x_init.s, params.terminate_prob)
        art.root.register(rt, rt.root.id)
        n_s = [art.root] + art.extend(art.root, plan)
        ss_layer(plan, n_s, goal, rt, scene, params, rng, AttachmentSampler(scene, x_init, rng))
        successes += rt.solution is not None
    rate = successes / attempts
    logger.info(f"{instance.id}: direct plan succeeded {successes}/{attempts} times")
    return rate
