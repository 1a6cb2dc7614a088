"""
JSON schema for scenes (pydantic), including the initial mode and configuration.
"""

import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from reachtamp.geometry.arm import ArmModel
from reachtamp.geometry.pose import Pose2
from reachtamp.geometry.scene import Body, Region, Scene
from reachtamp.geometry.shapes import Circle, Polygon, Shape
from reachtamp.tamp.modes import Attachment, Mode
from reachtamp.utils.exceptions import FileFormatError, GeometryError


class PoseModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    theta: float = 0.0

    @classmethod
    def from_pose(cls, pose: Pose2) -> "PoseModel":
        return cls(x=pose.x, y=pose.y, theta=pose.theta)

    def to_pose(self) -> Pose2:
        return Pose2(self.x, self.y, self.theta)


class CircleModel(BaseModel):
    kind: Literal["circle"] = "circle"
    radius: float


class PolygonModel(BaseModel):
    kind: Literal["polygon"] = "polygon"
    vertices: List[Tuple[float, float]]


ShapeModel = Union[CircleModel, PolygonModel]


def _shape_model(shape: Shape) -> ShapeModel:
    if isinstance(shape, Circle):
        return CircleModel(radius=shape.radius)
    return PolygonModel(vertices=list(shape.vertices))


def _shape(model: ShapeModel) -> Shape:
    if isinstance(model, CircleModel):
        return Circle(model.radius)
    return Polygon(tuple(model.vertices))


class RegionModel(BaseModel):
    x_min: float
    x_max: float
    y: float


class BodyModel(BaseModel):
    id: str
    movable: bool
    shape: ShapeModel = Field(discriminator="kind")
    pose: Optional[PoseModel] = None
    region: Optional[RegionModel] = None
    grasp_ports: List[PoseModel] = Field(default_factory=list)


class ArmFileModel(BaseModel):
    base: PoseModel = PoseModel(x=0.0, y=0.0)
    link_lengths: Tuple[float, float, float] = (1.0, 0.8, 0.6)
    link_width: float = 0.04
    joint_limits: List[Tuple[float, float]] = Field(default_factory=lambda: [list(lim) for lim in ArmModel().joint_limits])
    gripper_standoff: float = 0.02


class AttachmentModel(BaseModel):
    movable: str
    parent: str
    transform: PoseModel

    @classmethod
    def from_attachment(cls, att: Attachment) -> "AttachmentModel":
        return cls(movable=att.movable, parent=att.parent, transform=PoseModel.from_pose(att.transform))

    def to_attachment(self) -> Attachment:
        return Attachment(self.movable, self.parent, self.transform.to_pose())


class SceneFile(BaseModel):
    """On-disk scene: arm, bodies, and optionally the initial mode and configuration."""

    arm: ArmFileModel = Field(default_factory=ArmFileModel)
    bodies: List[BodyModel]
    initial_attachments: List[AttachmentModel] = Field(default_factory=list)
    initial_config: Optional[Tuple[float, float, float]] = None

    @classmethod
    def from_scene(cls, scene: Scene, mode: Optional[Mode] = None,
                   q: Optional[Tuple[float, ...]] = None) -> "SceneFile":
        arm = scene.arm
        bodies = []
        for body_id in sorted(scene.bodies):
            body = scene.bodies[body_id]
            pose = scene.static_poses.get(body_id)
            bodies.append(BodyModel(
                id=body_id,
                movable=body.movable,
                shape=_shape_model(body.shape),
                pose=PoseModel.from_pose(pose) if pose is not None else None,
                region=RegionModel(x_min=body.region.x_min, x_max=body.region.x_max, y=body.region.y)
                if body.region else None,
                grasp_ports=[PoseModel.from_pose(p) for p in body.grasp_ports],
            ))
        return cls(
            arm=ArmFileModel(base=PoseModel.from_pose(arm.base), link_lengths=arm.link_lengths,
                             link_width=arm.link_width, joint_limits=[list(lim) for lim in arm.joint_limits],
                             gripper_standoff=arm.gripper_standoff),
            bodies=bodies,
            initial_attachments=[AttachmentModel.from_attachment(a) for a in mode] if mode else [],
            initial_config=tuple(q) if q is not None else None,
        )

    def to_scene(self) -> Scene:
        arm = ArmModel(base=self.arm.base.to_pose(), link_lengths=tuple(self.arm.link_lengths),
                       link_width=self.arm.link_width,
                       joint_limits=tuple(tuple(lim) for lim in self.arm.joint_limits),
                       gripper_standoff=self.arm.gripper_standoff)
        bodies = {}
        static_poses = {}
        for b in self.bodies:
            region = Region(b.region.x_min, b.region.x_max, b.region.y) if b.region else None
            bodies[b.id] = Body(b.id, _shape(b.shape), b.movable, region,
                                tuple(p.to_pose() for p in b.grasp_ports))
            if b.pose is not None:
                static_poses[b.id] = b.pose.to_pose()
        return Scene(arm, bodies, static_poses)

    def initial_mode(self) -> Optional[Mode]:
        if not self.initial_attachments:
            return None
        return Mode.of(a.to_attachment() for a in self.initial_attachments)


def dump_scene(path: Union[str, Path], scene: Scene, mode: Optional[Mode] = None,
               q: Optional[Tuple[float, ...]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(SceneFile.from_scene(scene, mode, q).model_dump_json(indent=2), encoding="utf-8")
    return path


def load_scene(path: Union[str, Path]) -> SceneFile:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        scene_file = SceneFile.model_validate(data)
        scene_file.to_scene()
    except (OSError, json.JSONDecodeError, PydanticValidationError, GeometryError) as e:
        raise FileFormatError(f"Invalid scene file: {e}", str(path)) from e
    return scene_file
