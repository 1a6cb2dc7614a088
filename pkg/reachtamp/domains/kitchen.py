"""
Kitchen: food blocks start on a dish and must each be washed in the sink
and cooked on the stove. Sink and stove fit exactly m blocks plus a small
margin, so placements there are tight.
"""

from typing import Optional

import numpy as np

from reachtamp.config import REGION_MARGIN
from reachtamp.domains.common import (
    BLOCK_SIZE,
    BenchmarkInstance,
    block,
    finish_instance,
    make_scene,
    pddl_problem,
    resting,
    surface,
)
from reachtamp.geometry.scene import placement_range
from reachtamp.geometry.shapes import PlacedShape, collide_placed
from reachtamp.utils.exceptions import ValidationError
from reachtamp.utils.validation import validate_movable_count

KITCHEN_DOMAIN = """
(define (domain kitchen)
  (:requirements :strips :typing :negative-preconditions)
  (:types food surface agent - object)
  (:constants robot - agent sink stove - surface)
  (:predicates
    (attached ?f - food ?p - object)
    (handempty)
    (clean ?f - food)
    (cooked ?f - food))
  (:action pick
    :parameters (?f - food ?s - surface)
    :precondition (and (attached ?f ?s) (handempty))
    :effect (and (attached ?f robot) (not (attached ?f ?s)) (not (handempty))))
  (:action place
    :parameters (?f - food ?s - surface)
    :precondition (and (attached ?f robot))
    :effect (and (attached ?f ?s) (not (attached ?f robot)) (handempty)))
  (:action wash
    :parameters (?f - food)
    :precondition (and (attached ?f sink))
    :effect (and (clean ?f)))
  (:action cook
    :parameters (?f - food)
    :precondition (and (attached ?f stove) (clean ?f))
    :effect (and (cooked ?f))))
"""

SINK_RIGHT = -0.5
STOVE_LEFT = 0.4
DISH_LEFT = 1.0
DISH_SPREAD = 1.6


def build_kitchen(m: int, seed: int, margin: float = REGION_MARGIN, self_check: bool = True) -> BenchmarkInstance:
    """
    m food blocks spread on the dish; sink and stove each `m * w * (1 + margin)` wide.
    The seed jitters the initial positions on the dish. With `self_check` the
    sink must admit no (m+1)-th block once m are placed.
    """
    validate_movable_count("kitchen", m)
    rng = np.random.default_rng(seed)
    w = BLOCK_SIZE
    tight = m * w * (1.0 + margin)

    sink = surface("sink", SINK_RIGHT - tight, SINK_RIGHT)
    stove = surface("stove", STOVE_LEFT, STOVE_LEFT + tight)
    dish = surface("dish", DISH_LEFT, DISH_LEFT + m * w * DISH_SPREAD)
    foods = [block(f"f{i}") for i in range(1, m + 1)]

    dish_body = dish[0]
    slot = dish_body.region.width / m
    jitter = (slot - w) / 4
    attachments = []
    for i, food in enumerate(foods):
        u = dish_body.region.x_min + slot * (i + 0.5) + float(rng.uniform(-jitter, jitter))
        attachments.append(resting(food, dish_body, u))

    scene = make_scene([sink, stove, dish], foods)
    names = [f.id for f in foods]
    problem = pddl_problem(
        f"kitchen-{m}", "kitchen",
        {"food": names, "surface": ["dish"]},
        [f"(attached {f} dish)" for f in names] + ["(handempty)"],
        [f"(cooked {f})" for f in names],
    )
    instance = finish_instance("kitchen", m, seed, KITCHEN_DOMAIN, problem, scene, attachments)
    if self_check and not check_kitchen_tightness(instance):
        raise ValidationError(f"{instance.id}: sink admits more than {m} blocks")
    return instance


def check_kitchen_tightness(instance: BenchmarkInstance, draws: int = 200,
                            rng: Optional[np.random.Generator] = None) -> bool:
    """
    With m blocks arranged on the sink, every further placement draw must
    collide with one of them.
    """
    rng = rng if rng is not None else np.random.default_rng(instance.seed)
    scene = instance.scene
    sink = scene.body("sink")
    sink_pose = scene.static_poses["sink"]
    food = scene.body(scene.movables[0])
    lo, hi = placement_range(sink, food.shape)
    width = food.shape.bounds()[2] - food.shape.bounds()[0]

    # m blocks, left-packed with the spare room split into random gaps
    spare = (hi - lo) - (instance.m - 1) * width
    if spare < 0:
        return False
    gaps = np.sort(rng.uniform(0.0, spare, size=instance.m))
    offsets = [lo + gaps[k] + k * width for k in range(instance.m)]
    placed = [PlacedShape(food.shape, sink_pose @ resting(food, sink, u).transform) for u in offsets]

    for _ in range(draws):
        u = float(rng.uniform(lo, hi))
        extra = PlacedShape(food.shape, sink_pose @ resting(food, sink, u).transform)
        if not any(collide_placed(extra, p) for p in placed):
            return False
    return True
