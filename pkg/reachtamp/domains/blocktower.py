"""
Blocktower: blocks start in seeded-random stacks on the left and right
plates and must be stacked on the centre plate in a fixed order.
"""

import numpy as np

from reachtamp.domains.common import (
    BenchmarkInstance,
    block,
    finish_instance,
    make_scene,
    pddl_problem,
    resting,
    surface,
)
from reachtamp.utils.validation import validate_movable_count

BLOCKTOWER_DOMAIN = """
(define (domain blocktower)
  (:requirements :strips :typing :negative-preconditions)
  (:types block plate agent - object)
  (:constants robot - agent)
  (:predicates
    (attached ?b - block ?p - object)
    (clear ?x - object)
    (handempty))
  (:action pick
    :parameters (?b - block ?p - plate)
    :precondition (and (attached ?b ?p) (clear ?b) (handempty))
    :effect (and (attached ?b robot) (clear ?p)
                 (not (attached ?b ?p)) (not (clear ?b)) (not (handempty))))
  (:action place
    :parameters (?b - block ?p - plate)
    :precondition (and (attached ?b robot) (clear ?p))
    :effect (and (attached ?b ?p) (clear ?b) (handempty)
                 (not (attached ?b robot)) (not (clear ?p))))
  (:action unstack
    :parameters (?b - block ?c - block)
    :precondition (and (attached ?b ?c) (clear ?b) (handempty))
    :effect (and (attached ?b robot) (clear ?c)
                 (not (attached ?b ?c)) (not (clear ?b)) (not (handempty))))
  (:action stack
    :parameters (?b - block ?c - block)
    :precondition (and (attached ?b robot) (clear ?c))
    :effect (and (attached ?b ?c) (clear ?b) (handempty)
                 (not (attached ?b robot)) (not (clear ?c)))))
"""

PLATE_WIDTH = 0.10
PLATES = {"left": 0.55, "center": 0.85, "right": 1.15}


def build_blocktower(m: int, seed: int) -> BenchmarkInstance:
    """
    Goal: b1 on b2 on ... on bm on the centre plate, each block centred on its support.
    """
    validate_movable_count("blocktower", m)
    rng = np.random.default_rng(seed)
    plates = {name: surface(name, x - PLATE_WIDTH / 2, x + PLATE_WIDTH / 2) for name, x in PLATES.items()}
    blocks = [block(f"b{i}") for i in range(1, m + 1)]

    stacks = {"left": [], "right": []}
    for index in rng.permutation(m):
        stacks["left" if rng.random() < 0.5 else "right"].append(blocks[int(index)])

    attachments = []
    init = ["(handempty)", "(clear center)"]
    for plate_name, stack in stacks.items():
        if not stack:
            init.append(f"(clear {plate_name})")
            continue
        attachments.append(resting(stack[0], plates[plate_name][0], 0.0))
        init.append(f"(attached {stack[0].id} {plate_name})")
        for lower, upper in zip(stack, stack[1:]):
            attachments.append(resting(upper, lower, 0.0))
            init.append(f"(attached {upper.id} {lower.id})")
        init.append(f"(clear {stack[-1].id})")

    goal_attachments = [resting(blocks[-1], plates["center"][0], 0.0)]
    goal_attachments += [resting(upper, lower, 0.0) for upper, lower in zip(blocks, blocks[1:])]

    scene = make_scene(plates.values(), blocks)
    problem = pddl_problem(
        f"blocktower-{m}", "blocktower",
        {"block": [b.id for b in blocks], "plate": list(PLATES)},
        init,
        [f"(attached {a.movable} {a.parent})" for a in goal_attachments],
    )
    return finish_instance("blocktower", m, seed, BLOCKTOWER_DOMAIN, problem, scene,
                           attachments, goal_attachments)
