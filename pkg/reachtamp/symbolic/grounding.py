"""
Eager grounding of a parsed domain/problem pair.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Mapping, Sequence, Tuple

from reachtamp.symbolic.model import (
    ATTACHED,
    AbstractState,
    Atom,
    DomainModel,
    GroundAction,
    ProblemModel,
)
from reachtamp.symbolic.parser import type_objects
from reachtamp.utils.exceptions import ValidationError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class GroundProblem:
    """Immutable ground STRIPS model; safe to share between solves."""

    domain: DomainModel
    problem: ProblemModel
    actions: Tuple[GroundAction, ...]

    @property
    def init(self) -> AbstractState:
        return self.problem.init

    @property
    def goal(self) -> FrozenSet[Atom]:
        return self.problem.goal

    @property
    def objects(self) -> Mapping[str, str]:
        return self.problem.objects

    @cached_property
    def _index(self) -> Dict[Tuple[str, Tuple[str, ...]], GroundAction]:
        return {(a.name, a.args): a for a in self.actions}

    def action(self, name: str, *args: str) -> GroundAction:
        key = (name.lower(), tuple(a.lower() for a in args))
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError(f"No ground action ({' '.join((key[0],) + key[1])})") from None

    @cached_property
    def movables(self) -> Tuple[str, ...]:
        """Objects that can fill the first slot of `attached`."""
        signature = self.domain.predicates.get(ATTACHED)
        if not signature:
            return ()
        return tuple(type_objects(self.domain, dict(self.objects), signature[0]))


def ground(domain: DomainModel, problem: ProblemModel) -> GroundProblem:
    """
    Instantiate every schema over type-compatible objects.

    Bindings whose static preconditions (predicates no action changes)
    contradict the initial state are pruned.
    """
    objects = dict(problem.objects)
    fluent = {t.predicate for s in domain.schemas for t in s.add + s.delete}
    init = problem.init.atoms

    actions = []
    for schema in domain.schemas:
        candidates: Sequence[Sequence[str]] = [type_objects(domain, objects, p.type) for p in schema.parameters]
        static_pos = [t for t in schema.pre_pos if t.predicate not in fluent]
        static_neg = [t for t in schema.pre_neg if t.predicate not in fluent]
        for args in itertools.product(*candidates):
            binding = {p.name: a for p, a in zip(schema.parameters, args)}
            if any(t.ground(binding) not in init for t in static_pos):
                continue
            if any(t.ground(binding) in init for t in static_neg):
                continue
            actions.append(GroundAction.from_schema(schema, tuple(args)))

    logger.info(f"Grounded {problem.name}: {len(actions)} actions over {len(objects)} objects")
    return GroundProblem(domain, problem, tuple(actions))
