"""
Convex shapes and pairwise collision tests.

Polygon pairs use the separating axis test; circles are handled in closed
form. Touching within the contact margin counts as a collision.
"""

import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from reachtamp.config import CONTACT_MARGIN
from reachtamp.geometry.pose import Pose2
from reachtamp.utils.exceptions import InvalidShapeError


@dataclass(frozen=True)
class Circle:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidShapeError(f"Circle radius must be positive, got {self.radius}")

    def bounds(self) -> Tuple[float, float, float, float]:
        r = self.radius
        return -r, -r, r, r


@dataclass(frozen=True)
class Polygon:
    """Convex polygon, vertices counter-clockwise in the body frame."""

    vertices: Tuple[Tuple[float, float], ...]
    points: np.ndarray = field(init=False, repr=False, compare=False)
    edge_normals: np.ndarray = field(init=False, repr=False, compare=False)
    axes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(vertices) < 3:
            raise InvalidShapeError("Polygon needs at least 3 vertices")
        points = np.array(vertices, dtype=float)
        edges = np.roll(points, -1, axis=0) - points
        lengths = np.linalg.norm(edges, axis=1)
        if np.any(lengths < 1e-12):
            raise InvalidShapeError("Polygon has repeated vertices")
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        area = 0.5 * float(np.sum(points[:, 0] * np.roll(points[:, 1], -1) - np.roll(points[:, 0], -1) * points[:, 1]))
        if area <= 1e-12:
            raise InvalidShapeError("Polygon must be counter-clockwise with positive area")
        if np.any(cross < -1e-12):
            raise InvalidShapeError("Polygon must be convex")
        normals = np.stack((edges[:, 1], -edges[:, 0]), axis=1) / lengths[:, None]

        # SAT only needs directions up to sign
        unique = []
        for n in normals:
            if not any(abs(n[0] * u[1] - n[1] * u[0]) < 1e-9 for u in unique):
                unique.append(n)

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "edge_normals", normals)
        object.__setattr__(self, "axes", np.array(unique))

    @classmethod
    def box(cls, width: float, height: float, center: Tuple[float, float] = (0.0, 0.0)) -> "Polygon":
        if not (width > 0 and height > 0):
            raise InvalidShapeError(f"Box sides must be positive, got {width}x{height}")
        cx, cy = center
        w, h = width / 2, height / 2
        return cls(((cx - w, cy - h), (cx + w, cy - h), (cx + w, cy + h), (cx - w, cy + h)))

    @classmethod
    def capsule(cls, length: float, radius: float, cap_segments: int = 4) -> "Polygon":
        """Stadium around the segment (0,0)-(length,0), caps as inscribed arcs."""
        right = [(length + radius * math.cos(a), radius * math.sin(a))
                 for a in np.linspace(-math.pi / 2, math.pi / 2, cap_segments + 1)]
        left = [(radius * math.cos(a), radius * math.sin(a))
                for a in np.linspace(math.pi / 2, 3 * math.pi / 2, cap_segments + 1)]
        return cls(tuple(right + left))

    def area(self) -> float:
        p = self.points
        return 0.5 * float(np.sum(p[:, 0] * np.roll(p[:, 1], -1) - np.roll(p[:, 0], -1) * p[:, 1]))

    def bounds(self) -> Tuple[float, float, float, float]:
        p = self.points
        return float(p[:, 0].min()), float(p[:, 1].min()), float(p[:, 0].max()), float(p[:, 1].max())

    def perimeter(self) -> float:
        return float(np.sum(np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)))

    def contains(self, px: float, py: float, tolerance: float = 1e-9) -> bool:
        offsets = np.array([px, py]) - self.points
        return bool(np.all(np.sum(offsets * self.edge_normals, axis=1) <= tolerance))


Shape = Union[Circle, Polygon]


class PlacedShape:
    """A shape resolved into world coordinates, with its bounding box."""

    __slots__ = ("shape", "pose", "points", "axes", "center", "radius", "aabb")

    def __init__(self, shape: Shape, pose: Pose2):
        self.shape = shape
        self.pose = pose
        if isinstance(shape, Circle):
            self.points = None
            self.axes = None
            self.center = (pose.x, pose.y)
            self.radius = shape.radius
            r = shape.radius
            self.aabb = (pose.x - r, pose.y - r, pose.x + r, pose.y + r)
        else:
            c, s = math.cos(pose.theta), math.sin(pose.theta)
            rotation = np.array([[c, -s], [s, c]])
            self.points = shape.points @ rotation.T + np.array([pose.x, pose.y])
            self.axes = shape.axes @ rotation.T
            self.center = None
            self.radius = None
            self.aabb = (float(self.points[:, 0].min()), float(self.points[:, 1].min()),
                         float(self.points[:, 0].max()), float(self.points[:, 1].max()))


def place(shape: Shape, pose: Pose2) -> PlacedShape:
    return PlacedShape(shape, pose)


def _polygons_collide(a: PlacedShape, b: PlacedShape, margin: float) -> bool:
    axes = np.vstack((a.axes, b.axes))
    pa = a.points @ axes.T
    pb = b.points @ axes.T
    gap = np.maximum(pb.min(axis=0) - pa.max(axis=0), pa.min(axis=0) - pb.max(axis=0))
    return not bool(np.any(gap > margin))


def _polygon_circle_collide(poly: PlacedShape, circle: PlacedShape, margin: float) -> bool:
    center = np.array(circle.center)
    v0 = poly.points
    edges = np.roll(v0, -1, axis=0) - v0
    normals = np.stack((edges[:, 1], -edges[:, 0]), axis=1) / np.linalg.norm(edges, axis=1)[:, None]
    if np.all(np.sum((center - v0) * normals, axis=1) <= 0.0):
        return True
    t = np.clip(np.sum((center - v0) * edges, axis=1) / np.sum(edges * edges, axis=1), 0.0, 1.0)
    closest = v0 + t[:, None] * edges
    distance = float(np.min(np.linalg.norm(center - closest, axis=1)))
    return distance <= circle.radius + margin


def collide_placed(a: PlacedShape, b: PlacedShape, margin: float = CONTACT_MARGIN) -> bool:
    ax0, ay0, ax1, ay1 = a.aabb
    bx0, by0, bx1, by1 = b.aabb
    if bx0 - ax1 > margin or ax0 - bx1 > margin or by0 - ay1 > margin or ay0 - by1 > margin:
        return False
    if a.points is not None and b.points is not None:
        return _polygons_collide(a, b, margin)
    if a.points is None and b.points is None:
        dx = a.center[0] - b.center[0]
        dy = a.center[1] - b.center[1]
        return math.hypot(dx, dy) <= a.radius + b.radius + margin
    if a.points is None:
        return _polygon_circle_collide(b, a, margin)
    return _polygon_circle_collide(a, b, margin)


def collide(a: Shape, pa: Pose2, b: Shape, pb: Pose2, margin: float = CONTACT_MARGIN) -> bool:
    """True iff the shapes overlap or their boundaries come within `margin`."""
    return collide_placed(PlacedShape(a, pa), PlacedShape(b, pb), margin)


def perimeter_ports(shape: Shape, count: int = 8) -> Tuple[Pose2, ...]:
    """
    Grasp ports at fractions k/count of the perimeter, starting at the first
    vertex (polygons) or at the bottom point (circles). Each port's x axis is
    the approach direction, pointing into the shape.
    """
    if isinstance(shape, Circle):
        ports = []
        for k in range(count):
            phi = -math.pi / 2 + 2 * math.pi * k / count
            ports.append(Pose2(shape.radius * math.cos(phi), shape.radius * math.sin(phi), phi + math.pi))
        return tuple(ports)

    points = shape.points
    edges = np.roll(points, -1, axis=0) - points
    lengths = np.linalg.norm(edges, axis=1)
    normals = shape.edge_normals
    total = float(lengths.sum())
    cumulative = np.concatenate(([0.0], np.cumsum(lengths)))
    ports = []
    for k in range(count):
        s = total * k / count
        i = min(int(np.searchsorted(cumulative, s, side="right")) - 1, len(points) - 1)
        offset = s - cumulative[i]
        if offset < 1e-9:
            inward = -(normals[i] + normals[i - 1])
        elif lengths[i] - offset < 1e-9:
            inward = -(normals[i] + normals[(i + 1) % len(points)])
        else:
            inward = -normals[i]
        point = points[i] + edges[i] * (offset / lengths[i])
        ports.append(Pose2(float(point[0]), float(point[1]), math.atan2(inward[1], inward[0])))
    return tuple(ports)


