import math

import numpy as np
import pytest

from reachtamp.domains.common import HOME_CONFIG, block, make_scene, resting, surface
from reachtamp.domains.kitchen import KITCHEN_DOMAIN, build_kitchen
from reachtamp.geometry.arm import ArmModel
from reachtamp.symbolic.grounding import ground
from reachtamp.symbolic.parser import parse_domain, parse_problem
from reachtamp.tamp.modes import Mode

TOY_DOMAIN = """
(define (domain toy)
  (:predicates (p) (q) (r))
  (:action a :parameters () :precondition (and (p)) :effect (and (q)))
  (:action b :parameters () :precondition (and (q)) :effect (and (r) (not (p)))))
"""

TOY_PROBLEM = """
(define (problem toy-1)
  (:domain toy)
  (:init (p))
  (:goal (and (r))))
"""

KITCHEN_ONE = """
(define (problem kitchen-1)
  (:domain kitchen)
  (:objects f1 - food dish - surface)
  (:init (attached f1 dish) (handempty))
  (:goal (and (cooked f1))))
"""


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def arm():
    return ArmModel()


@pytest.fixture(scope="session")
def kitchen_domain():
    return parse_domain(KITCHEN_DOMAIN)


@pytest.fixture(scope="session")
def kitchen_ground(kitchen_domain):
    return ground(kitchen_domain, parse_problem(KITCHEN_ONE, kitchen_domain))


@pytest.fixture(scope="session")
def toy_ground():
    domain = parse_domain(TOY_DOMAIN)
    return ground(domain, parse_problem(TOY_PROBLEM, domain))


@pytest.fixture(scope="session")
def kitchen1():
    return build_kitchen(1, 0)


@pytest.fixture
def table_scene():
    """One table under the end-effector's home position with a block resting on it."""
    table = surface("table", 0.5, 1.1)
    box = block("box")
    scene = make_scene([table], [box])
    mode = Mode.of([resting(box, table[0], 0.0)])
    return scene, mode


@pytest.fixture
def home():
    return HOME_CONFIG


def angle_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(math.remainder(a - b, 2 * math.pi)) <= tol
