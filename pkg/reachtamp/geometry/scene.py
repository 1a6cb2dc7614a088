"""
Scenes, world poses under a mode, and collision-free membership tests.
"""

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from reachtamp.config import CONTACT_MARGIN
from reachtamp.geometry.arm import ArmModel, fk
from reachtamp.geometry.pose import Pose2
from reachtamp.geometry.shapes import PlacedShape, Polygon, Shape, collide_placed, perimeter_ports
from reachtamp.symbolic.model import ROBOT
from reachtamp.tamp.modes import Mode
from reachtamp.utils.exceptions import InvalidShapeError, KinematicChainError, TransitionContractError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Region:
    """Horizontal support segment on a body's top face, in the body frame."""

    x_min: float
    x_max: float
    y: float

    def __post_init__(self):
        if self.x_min > self.x_max:
            raise InvalidShapeError(f"Region bounds reversed: {self.x_min} > {self.x_max}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min


@dataclass(frozen=True)
class Body:
    id: str
    shape: Shape
    movable: bool
    region: Optional[Region] = None
    grasp_ports: Tuple[Pose2, ...] = ()

    def __post_init__(self):
        if self.id == ROBOT:
            raise InvalidShapeError(f"'{ROBOT}' is reserved for the arm")
        if self.movable and not self.grasp_ports:
            object.__setattr__(self, "grasp_ports", perimeter_ports(self.shape))
        if self.region is not None and isinstance(self.shape, Polygon):
            for x in (self.region.x_min, self.region.x_max):
                if not self.shape.contains(x, self.region.y, tolerance=1e-6):
                    raise InvalidShapeError(f"Region of '{self.id}' leaves the body outline")


@dataclass(frozen=True, eq=False)
class Scene:
    arm: ArmModel
    bodies: Mapping[str, Body]
    static_poses: Mapping[str, Pose2] = field(default_factory=dict)

    def __post_init__(self):
        for body_id, body in self.bodies.items():
            if body_id != body.id:
                raise InvalidShapeError(f"Body key '{body_id}' does not match id '{body.id}'")
            if body.movable and body_id in self.static_poses:
                raise InvalidShapeError(f"Movable '{body_id}' cannot have a static pose")
            if not body.movable and body_id not in self.static_poses:
                raise InvalidShapeError(f"Static body '{body_id}' needs a pose")
        extra = set(self.static_poses) - set(self.bodies)
        if extra:
            raise InvalidShapeError(f"Static poses for unknown bodies: {sorted(extra)}")
        # touching is allowed (a wall standing on a table); FreeSpace never rechecks these pairs
        placed = [(b, PlacedShape(self.bodies[b].shape, self.static_poses[b])) for b in sorted(self.static_poses)]
        for (a, pa), (b, pb) in itertools.combinations(placed, 2):
            if collide_placed(pa, pb, margin=-CONTACT_MARGIN):
                raise InvalidShapeError(f"Static bodies '{a}' and '{b}' overlap")

    @cached_property
    def movables(self) -> Tuple[str, ...]:
        return tuple(sorted(b for b, body in self.bodies.items() if body.movable))

    @cached_property
    def statics(self) -> Tuple[str, ...]:
        return tuple(sorted(b for b, body in self.bodies.items() if not body.movable))

    @cached_property
    def static_placed(self) -> Dict[str, PlacedShape]:
        return {b: PlacedShape(self.bodies[b].shape, self.static_poses[b]) for b in self.statics}

    def body(self, body_id: str) -> Body:
        try:
            return self.bodies[body_id]
        except KeyError:
            raise KinematicChainError(f"Unknown body '{body_id}'") from None


def _chain(mode: Mode, scene: Scene, body_id: str) -> Tuple[str, List[Pose2]]:
    """Walk parent links from `body_id`; returns the root (robot or a static id) and the transforms."""
    transforms = []
    visited = set()
    current = body_id
    while True:
        if current in visited:
            raise KinematicChainError(f"Attachment cycle through '{current}'")
        visited.add(current)
        att = mode.attachment(current)
        transforms.append(att.transform)
        parent = att.parent
        if parent == ROBOT or parent in scene.static_poses:
            return parent, transforms
        if parent not in scene.bodies:
            raise KinematicChainError(f"'{current}' is attached to unknown parent '{parent}'")
        current = parent


def _resolve(root_pose: Pose2, transforms: Sequence[Pose2]) -> Pose2:
    pose = root_pose
    for transform in reversed(transforms):
        pose = pose @ transform
    return pose


def world_pose(mode: Mode, scene: Scene, q: Optional[Sequence[float]], body_id: str) -> Pose2:
    """World pose of a body: static pose, or the composition along its attachment chain."""
    if body_id in scene.static_poses:
        return scene.static_poses[body_id]
    scene.body(body_id)
    root, transforms = _chain(mode, scene, body_id)
    if root == ROBOT:
        if q is None:
            raise KinematicChainError(f"'{body_id}' hangs from the robot; a configuration is required")
        root_pose = fk(scene.arm, q).ee
    else:
        root_pose = scene.static_poses[root]
    return _resolve(root_pose, transforms)


def body_poses(mode: Mode, scene: Scene, q: Optional[Sequence[float]]) -> Dict[str, Pose2]:
    ee = fk(scene.arm, q).ee if q is not None else None
    poses = dict(scene.static_poses)
    for m in scene.movables:
        root, transforms = _chain(mode, scene, m)
        if root == ROBOT:
            if ee is None:
                raise KinematicChainError(f"'{m}' hangs from the robot; a configuration is required")
            poses[m] = _resolve(ee, transforms)
        else:
            poses[m] = _resolve(scene.static_poses[root], transforms)
    return poses


class FreeSpace:
    """
    Membership test for the collision-free configurations of one mode.

    Everything that does not move with the arm is placed once; each query
    then only places the links and whatever hangs from the end-effector.
    """

    def __init__(self, scene: Scene, mode: Mode, margin: float = CONTACT_MARGIN,
                 stats: Optional[Counter] = None):
        self.scene = scene
        self.mode = mode
        self.margin = margin
        self.stats = stats
        self.parent_of = mode.parent_map()

        self.carried: Dict[str, List[Pose2]] = {}
        self.fixed: Dict[str, PlacedShape] = dict(scene.static_placed)
        for m in scene.movables:
            root, transforms = _chain(mode, scene, m)
            if root == ROBOT:
                self.carried[m] = transforms
            else:
                self.fixed[m] = PlacedShape(scene.bodies[m].shape, _resolve(scene.static_poses[root], transforms))
        self.fixed_ok = self._fixed_pairs_free()

    def _exempt(self, a: str, b: str) -> bool:
        return self.parent_of.get(a) == b or self.parent_of.get(b) == a

    def _fixed_pairs_free(self) -> bool:
        for (a, pa), (b, pb) in itertools.combinations(sorted(self.fixed.items()), 2):
            if a in self.scene.static_poses and b in self.scene.static_poses:
                continue
            if self._exempt(a, b):
                continue
            if collide_placed(pa, pb, self.margin):
                logger.debug(f"Mode places {a} in contact with {b}")
                return False
        return True

    def contains(self, q: Sequence[float]) -> bool:
        if self.stats is not None:
            self.stats["collision_checks"] += 1
        if not self.fixed_ok:
            return False
        kin = fk(self.scene.arm, q)
        links = [PlacedShape(shape, frame) for shape, frame in zip(self.scene.arm.link_shapes, kin.link_frames)]

        if collide_placed(links[0], links[2], self.margin):
            return False

        carried = {m: PlacedShape(self.scene.bodies[m].shape, _resolve(kin.ee, transforms))
                   for m, transforms in self.carried.items()}

        for placed in self.fixed.values():
            for link in links:
                if collide_placed(link, placed, self.margin):
                    return False
        for m, placed in carried.items():
            if self.parent_of[m] == ROBOT:
                continue
            for link in links:
                if collide_placed(link, placed, self.margin):
                    return False

        for m, pm in carried.items():
            for b, pb in self.fixed.items():
                if not self._exempt(m, b) and collide_placed(pm, pb, self.margin):
                    return False
        for (a, pa), (b, pb) in itertools.combinations(sorted(carried.items()), 2):
            if not self._exempt(a, b) and collide_placed(pa, pb, self.margin):
                return False
        return True

    __contains__ = contains


def state_collision_free(scene: Scene, mode: Mode, q: Sequence[float], margin: float = CONTACT_MARGIN) -> bool:
    return FreeSpace(scene, mode, margin).contains(q)


def placement_range(parent: Body, child: Shape) -> Optional[Tuple[float, float]]:
    """Admissible horizontal offsets keeping the child's footprint inside the parent's region."""
    if parent.region is None:
        return None
    x0, _, x1, _ = child.bounds()
    lo = parent.region.x_min - x0
    hi = parent.region.x_max - x1
    if lo > hi + 1e-12:
        return None
    return lo, max(lo, hi)


def placement_transform(parent: Body, child: Shape, u: float) -> Pose2:
    """Child resting upright on the parent's region at horizontal offset u."""
    if parent.region is None:
        raise InvalidShapeError(f"'{parent.id}' has no placement region")
    _, y0, _, _ = child.bounds()
    return Pose2(u, parent.region.y - y0, 0.0)


def contact_target(sigma: Mode, sigma_next: Mode, scene: Scene) -> Tuple[str, Pose2]:
    """
    End-effector pose at a grasp/place switch between two modes.

    Exactly one movable may change, and exactly one side of the change must
    be a grasp. Returns the movable and the required end-effector pose.
    """
    changed = sigma.changed_movables(sigma_next)
    if len(changed) != 1:
        raise TransitionContractError(f"Modes must differ in exactly one attachment, got {changed}")
    m = changed[0]
    before, after = sigma[m], sigma_next[m]
    if after.is_grasp and not before.is_grasp:
        obj = world_pose(sigma, scene, None, m)
        return m, obj @ after.transform.inverse()
    if before.is_grasp and not after.is_grasp:
        obj = world_pose(sigma_next, scene, None, m)
        return m, obj @ before.transform.inverse()
    raise TransitionContractError(f"Change of '{m}' is neither a grasp nor a place")
