"""
STRIPS model types for the abstract layer.

Abstract states are closed-world sets of ground atoms. The `attached`
predicate is reserved: its atoms are the abstract attachments of a state,
and an action schema is geometric exactly when its effects touch it.
"""

import sys
import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

from reachtamp.utils.exceptions import NotApplicableError, ValidationError

ATTACHED = "attached"
ROBOT = "robot"
ROOT_TYPE = "object"


def intern_symbol(name: str) -> str:
    return sys.intern(name.lower())


@dataclass(frozen=True, order=True)
class Atom:
    """Ground atom `(predicate arg1 ... argn)`."""

    predicate: str
    args: Tuple[str, ...] = ()

    @classmethod
    def of(cls, predicate: str, *args: str) -> "Atom":
        return cls(intern_symbol(predicate), tuple(intern_symbol(a) for a in args))

    @property
    def is_attachment(self) -> bool:
        return self.predicate == ATTACHED

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate,) + self.args) + ")"


@dataclass(frozen=True)
class AbstractState:
    """Closed-world abstract state s = (psi, abstract attachments)."""

    atoms: FrozenSet[Atom] = frozenset()

    @classmethod
    def of(cls, atoms: Iterable[Atom]) -> "AbstractState":
        return cls(frozenset(atoms))

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.sorted_atoms())

    def __len__(self) -> int:
        return len(self.atoms)

    def sorted_atoms(self) -> Tuple[Atom, ...]:
        return tuple(sorted(self.atoms))

    @property
    def psi(self) -> FrozenSet[Atom]:
        """Atoms that are not abstract attachments."""
        return frozenset(a for a in self.atoms if not a.is_attachment)

    @property
    def abstract_attachments(self) -> FrozenSet[Tuple[str, str]]:
        """(movable, parent) pairs of the `attached` atoms."""
        return frozenset((a.args[0], a.args[1]) for a in self.atoms if a.is_attachment)

    def parent_of(self, movable: str) -> Optional[str]:
        for m, p in self.abstract_attachments:
            if m == movable:
                return p
        return None

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.sorted_atoms())


def check_attachment_invariant(state: AbstractState, movables: Iterable[str]) -> None:
    """Every movable appears in exactly one `attached(m, .)` atom."""
    counts: Dict[str, int] = {m: 0 for m in movables}
    for m, _ in state.abstract_attachments:
        if m in counts:
            counts[m] += 1
    bad = sorted(m for m, c in counts.items() if c != 1)
    if bad:
        raise ValidationError(f"Movables without exactly one attachment: {', '.join(bad)}")


@dataclass(frozen=True)
class AtomTemplate:
    """Lifted atom; terms starting with '?' are parameters, others constants."""

    predicate: str
    terms: Tuple[str, ...]

    def ground(self, binding: Mapping[str, str]) -> Atom:
        return Atom(self.predicate, tuple(binding[t] if t.startswith("?") else t for t in self.terms))

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate,) + self.terms) + ")"


class ActionKind(str, enum.Enum):
    GEOMETRIC = "geometric"
    NON_GEOMETRIC = "non-geometric"


@dataclass(frozen=True)
class Parameter:
    name: str
    type: str


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: Tuple[Parameter, ...]
    pre_pos: Tuple[AtomTemplate, ...] = ()
    pre_neg: Tuple[AtomTemplate, ...] = ()
    add: Tuple[AtomTemplate, ...] = ()
    delete: Tuple[AtomTemplate, ...] = ()

    @property
    def kind(self) -> ActionKind:
        touches = any(t.predicate == ATTACHED for t in self.add + self.delete)
        return ActionKind.GEOMETRIC if touches else ActionKind.NON_GEOMETRIC

    @property
    def is_geometric(self) -> bool:
        return self.kind is ActionKind.GEOMETRIC


@dataclass(frozen=True)
class GroundAction:
    """Schema instance; identity is the (name, args) pair."""

    name: str
    args: Tuple[str, ...]
    schema: ActionSchema = field(compare=False, repr=False)
    pre_pos: FrozenSet[Atom] = field(compare=False, repr=False, default=frozenset())
    pre_neg: FrozenSet[Atom] = field(compare=False, repr=False, default=frozenset())
    add: FrozenSet[Atom] = field(compare=False, repr=False, default=frozenset())
    delete: FrozenSet[Atom] = field(compare=False, repr=False, default=frozenset())

    @classmethod
    def from_schema(cls, schema: ActionSchema, args: Tuple[str, ...]) -> "GroundAction":
        if len(args) != len(schema.parameters):
            raise ValidationError(f"Action '{schema.name}' takes {len(schema.parameters)} arguments")
        binding = {p.name: a for p, a in zip(schema.parameters, args)}
        return cls(
            name=schema.name,
            args=tuple(args),
            schema=schema,
            pre_pos=frozenset(t.ground(binding) for t in schema.pre_pos),
            pre_neg=frozenset(t.ground(binding) for t in schema.pre_neg),
            add=frozenset(t.ground(binding) for t in schema.add),
            delete=frozenset(t.ground(binding) for t in schema.delete),
        )

    @property
    def binding(self) -> Dict[str, str]:
        return {p.name: a for p, a in zip(self.schema.parameters, self.args)}

    @property
    def kind(self) -> ActionKind:
        return self.schema.kind

    @property
    def is_geometric(self) -> bool:
        return self.schema.is_geometric

    @cached_property
    def attachment_change(self) -> Tuple[str, str]:
        """(movable, new parent) from the added `attached` atom."""
        added = sorted(a for a in self.add if a.is_attachment)
        if len(added) != 1:
            raise ValidationError(f"{self} must add exactly one '{ATTACHED}' atom to be sampled geometrically")
        movable, parent = added[0].args
        return movable, parent

    def __str__(self) -> str:
        return "(" + " ".join((self.name,) + self.args) + ")"


def applicable(s: AbstractState, a: GroundAction) -> bool:
    return a.pre_pos <= s.atoms and a.pre_neg.isdisjoint(s.atoms)


def apply(s: AbstractState, a: GroundAction) -> AbstractState:
    if not applicable(s, a):
        missing = sorted(str(p) for p in a.pre_pos - s.atoms)
        present = sorted(str(p) for p in a.pre_neg & s.atoms)
        raise NotApplicableError(
            f"{a} not applicable: missing {missing or '[]'}, forbidden {present or '[]'}"
        )
    return AbstractState((s.atoms - a.delete) | a.add)


def successor(s: AbstractState, a: GroundAction) -> AbstractState:
    """apply() without the applicability check, for search inner loops."""
    return AbstractState((s.atoms - a.delete) | a.add)


@dataclass(frozen=True)
class DomainModel:
    name: str
    requirements: Tuple[str, ...]
    types: Mapping[str, Optional[str]]
    constants: Mapping[str, str]
    predicates: Mapping[str, Tuple[str, ...]]
    schemas: Tuple[ActionSchema, ...]

    def is_subtype(self, child: str, ancestor: str) -> bool:
        seen = set()
        current: Optional[str] = child
        while current is not None and current not in seen:
            if current == ancestor:
                return True
            seen.add(current)
            current = self.types.get(current)
        return ancestor == ROOT_TYPE

    def schema(self, name: str) -> ActionSchema:
        for s in self.schemas:
            if s.name == name:
                return s
        raise ValidationError(f"Unknown action schema '{name}'")

    @property
    def geometric_schemas(self) -> Tuple[ActionSchema, ...]:
        return tuple(s for s in self.schemas if s.is_geometric)

    @property
    def non_geometric_schemas(self) -> Tuple[ActionSchema, ...]:
        return tuple(s for s in self.schemas if not s.is_geometric)


@dataclass(frozen=True)
class ProblemModel:
    name: str
    domain_name: str
    objects: Mapping[str, str]
    init: AbstractState
    goal: FrozenSet[Atom]
