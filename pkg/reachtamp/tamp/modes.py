"""
Attachments and modes: the continuous half of a hybrid state besides q.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from reachtamp.geometry.pose import Pose2
from reachtamp.symbolic.model import ROBOT
from reachtamp.utils.exceptions import KinematicChainError, TransitionContractError


@dataclass(frozen=True)
class Attachment:
    """Movable `movable` rigidly attached to `parent`; child pose = parent pose ∘ transform."""

    movable: str
    parent: str
    transform: Pose2

    @property
    def is_grasp(self) -> bool:
        return self.parent == ROBOT

    @property
    def pair(self) -> Tuple[str, str]:
        return self.movable, self.parent


@dataclass(frozen=True)
class Mode:
    attachments: Tuple[Attachment, ...]

    @classmethod
    def of(cls, attachments: Iterable[Attachment]) -> "Mode":
        ordered = tuple(sorted(attachments, key=lambda a: a.movable))
        seen = set()
        for att in ordered:
            if att.movable in seen:
                raise KinematicChainError(f"Movable '{att.movable}' has more than one attachment")
            if att.movable == att.parent:
                raise KinematicChainError(f"Movable '{att.movable}' is attached to itself")
            seen.add(att.movable)
        mode = cls(ordered)
        mode._check_acyclic()
        return mode

    def _check_acyclic(self) -> None:
        parents = self.parent_map()
        for start in parents:
            visited = {start}
            current = parents[start]
            while current in parents:
                if current in visited:
                    raise KinematicChainError(f"Attachment cycle through '{start}'")
                visited.add(current)
                current = parents[current]

    def attachment(self, movable: str) -> Attachment:
        for att in self.attachments:
            if att.movable == movable:
                return att
        raise KinematicChainError(f"Mode has no attachment for '{movable}'")

    __getitem__ = attachment

    def __iter__(self):
        return iter(self.attachments)

    def __len__(self) -> int:
        return len(self.attachments)

    @property
    def movables(self) -> Tuple[str, ...]:
        return tuple(att.movable for att in self.attachments)

    def parent_map(self) -> Dict[str, str]:
        return {att.movable: att.parent for att in self.attachments}

    def abstract_pairs(self) -> frozenset:
        return frozenset(att.pair for att in self.attachments)

    def held(self) -> Tuple[str, ...]:
        return tuple(att.movable for att in self.attachments if att.is_grasp)

    def replace(self, attachment: Attachment) -> "Mode":
        """Copy of this mode with the attachment of `attachment.movable` swapped."""
        self.attachment(attachment.movable)
        return Mode.of([attachment if att.movable == attachment.movable else att for att in self.attachments])

    def changed_movables(self, other: "Mode") -> List[str]:
        mine = {att.movable: att for att in self.attachments}
        theirs = {att.movable: att for att in other.attachments}
        if mine.keys() != theirs.keys():
            raise TransitionContractError("Modes cover different movables")
        return [m for m in sorted(mine) if mine[m] != theirs[m]]
