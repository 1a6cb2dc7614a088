"""
Implicitly defined goal set G: symbolic atoms plus geometric goal values.
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, FrozenSet, Iterable, Mapping, Optional, Tuple

from reachtamp.symbolic.model import ATTACHED, AbstractState, Atom
from reachtamp.utils.exceptions import ValidationError

if TYPE_CHECKING:
    from reachtamp.tamp.modes import Attachment


@dataclass(frozen=True)
class GoalSpec:
    atoms: FrozenSet[Atom]
    goal_attachments: Mapping[Atom, "Attachment"] = field(default_factory=dict)
    robot_config: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        for key, attachment in self.goal_attachments.items():
            if not key.is_attachment:
                raise ValidationError(f"Goal attachment key {key} is not an 'attached' atom")
            if key not in self.atoms:
                raise ValidationError(f"Goal attachment key {key} missing from goal atoms")
            if (attachment.movable, attachment.parent) != key.args:
                raise ValidationError(f"Goal attachment for {key} names {attachment.movable}/{attachment.parent}")

    @classmethod
    def of(cls, atoms: Iterable[Atom], goal_attachments: Optional[Iterable["Attachment"]] = None,
           robot_config: Optional[Tuple[float, ...]] = None) -> "GoalSpec":
        atoms = frozenset(atoms)
        attachments = {}
        for att in goal_attachments or ():
            key = Atom.of(ATTACHED, att.movable, att.parent)
            attachments[key] = att
            atoms = atoms | {key}
        return cls(atoms, attachments, robot_config)

    def goal_attachment_for(self, atom: Atom) -> Optional["Attachment"]:
        return self.goal_attachments.get(atom)


def goal_satisfied(s: AbstractState, goal: GoalSpec) -> bool:
    return goal.atoms <= s.atoms
