"""
PDDL-subset reader built on a lark LALR parser.

Syntax errors carry the line/column reported by lark; semantic checks
(undeclared symbols, arity) carry the position of the offending token.
"""

from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedInput

from reachtamp.symbolic.grammar import PDDL_GRAMMAR
from reachtamp.symbolic.model import (
    ROOT_TYPE,
    AbstractState,
    ActionSchema,
    Atom,
    AtomTemplate,
    DomainModel,
    Parameter,
    ProblemModel,
    intern_symbol,
)
from reachtamp.utils.exceptions import (
    ArityMismatchError,
    PddlSyntaxError,
    UndeclaredSymbolError,
)
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(PDDL_GRAMMAR, start="start", parser="lalr", propagate_positions=True)


def _parse_tree(text: str, expected: str) -> Tree:
    try:
        tree = _parser().parse(text.lower())
    except UnexpectedInput as e:
        raise PddlSyntaxError(f"Unexpected input near {e.get_context(text).strip()!r}",
                              getattr(e, "line", None), getattr(e, "column", None)) from e
    body = tree.children[0]
    if body.data != expected:
        raise PddlSyntaxError(f"Expected a {expected} definition, found a {body.data}", 1, 1)
    return body


def _typed_list(tree: Tree) -> List[Tuple[Token, Token]]:
    """Resolve `a b - t c` into [(a, t), (b, t), (c, object)]."""
    result: List[Tuple[Token, Token]] = []
    pending: List[Token] = []
    for child in tree.children:
        if isinstance(child, Tree):
            type_token = child.children[0]
            result.extend((name, type_token) for name in pending)
            pending = []
        else:
            pending.append(child)
    result.extend((name, Token("NAME", ROOT_TYPE)) for name in pending)
    return result


def _sections(body: Tree, name: str) -> List[Tree]:
    return [c for c in body.children if isinstance(c, Tree) and c.data == name]


class _Scope:
    """Declared predicates and symbols against which atoms are checked."""

    def __init__(self, predicates: Dict[str, Tuple[str, ...]], symbols: Dict[str, str]):
        self.predicates = predicates
        self.symbols = symbols

    def template(self, atom: Tree, variables: Optional[Dict[str, str]]) -> AtomTemplate:
        head, *terms = atom.children
        predicate = str(head)
        if predicate not in self.predicates:
            raise UndeclaredSymbolError(predicate, "predicate", head.line, head.column)
        expected = len(self.predicates[predicate])
        if len(terms) != expected:
            raise ArityMismatchError(predicate, expected, len(terms), head.line, head.column)
        for term in terms:
            if term.type == "VARIABLE":
                if variables is None:
                    raise PddlSyntaxError(f"Variable {term} not allowed in a ground atom", term.line, term.column)
                if str(term) not in variables:
                    raise UndeclaredSymbolError(str(term), "variable", term.line, term.column)
            elif str(term) not in self.symbols:
                raise UndeclaredSymbolError(str(term), "object", term.line, term.column)
        return AtomTemplate(intern_symbol(predicate), tuple(intern_symbol(str(t)) for t in terms))

    def literals(self, condition: Optional[Tree], variables: Optional[Dict[str, str]]):
        positive: List[AtomTemplate] = []
        negative: List[AtomTemplate] = []
        if condition is None:
            return positive, negative
        for child in condition.children:
            if child.data == "negation":
                negative.append(self.template(child.children[0], variables))
            else:
                positive.append(self.template(child, variables))
        return positive, negative


def _declare_types(body: Tree) -> Dict[str, Optional[str]]:
    types: Dict[str, Optional[str]] = {ROOT_TYPE: None}
    for section in _sections(body, "types"):
        for name, parent in _typed_list(section.children[0]):
            types[intern_symbol(str(name))] = intern_symbol(str(parent))
    for name, parent in list(types.items()):
        if parent is not None and parent not in types:
            raise UndeclaredSymbolError(parent, "type")
    return types


def _check_type(types: Dict[str, Optional[str]], token: Token) -> str:
    name = intern_symbol(str(token))
    if name not in types:
        raise UndeclaredSymbolError(name, "type", getattr(token, "line", None), getattr(token, "column", None))
    return name


def parse_domain(text: str) -> DomainModel:
    """
    Parse a domain definition.

    Args:
        text (str): PDDL domain text

    Returns:
        DomainModel: predicates, types, constants and classified action schemas

    Raises:
        PddlSyntaxError, UndeclaredSymbolError, ArityMismatchError
    """
    body = _parse_tree(text, "domain")
    name = intern_symbol(str(body.children[0]))
    requirements = tuple(str(t) for s in _sections(body, "requirements") for t in s.children)
    types = _declare_types(body)

    constants: Dict[str, str] = {}
    for section in _sections(body, "constants"):
        for const, type_token in _typed_list(section.children[0]):
            constants[intern_symbol(str(const))] = _check_type(types, type_token)

    predicates: Dict[str, Tuple[str, ...]] = {}
    for section in _sections(body, "predicates"):
        for decl in section.children:
            head, typed_vars = decl.children
            predicates[intern_symbol(str(head))] = tuple(
                _check_type(types, t) for _, t in _typed_list(typed_vars)
            )

    scope = _Scope(predicates, constants)
    schemas: List[ActionSchema] = []
    for action in _sections(body, "action"):
        action_name, typed_vars, *rest = action.children
        parameters = tuple(
            Parameter(intern_symbol(str(var)), _check_type(types, t)) for var, t in _typed_list(typed_vars)
        )
        variables = {p.name: p.type for p in parameters}
        precondition = next((r.children[0] for r in rest if r.data == "precondition"), None)
        effect = next((r.children[0] for r in rest if r.data == "effect"), None)
        pre_pos, pre_neg = scope.literals(precondition, variables)
        add, delete = scope.literals(effect, variables)
        schema = ActionSchema(intern_symbol(str(action_name)), parameters,
                              tuple(pre_pos), tuple(pre_neg), tuple(add), tuple(delete))
        schemas.append(schema)
        logger.debug(f"Parsed action {schema.name} ({schema.kind.value})")

    return DomainModel(name, requirements, types, constants, predicates, tuple(schemas))


def parse_problem(text: str, domain: DomainModel) -> ProblemModel:
    """
    Parse a problem definition against an already parsed domain.

    Raises:
        PddlSyntaxError: on syntax errors or negative goal literals
        UndeclaredSymbolError, ArityMismatchError
    """
    body = _parse_tree(text, "problem")
    name = intern_symbol(str(body.children[0]))
    domain_token = body.children[1]
    if intern_symbol(str(domain_token)) != domain.name:
        raise UndeclaredSymbolError(str(domain_token), "domain", domain_token.line, domain_token.column)

    types = dict(domain.types)
    objects: Dict[str, str] = dict(domain.constants)
    for section in _sections(body, "objects"):
        for obj, type_token in _typed_list(section.children[0]):
            objects[intern_symbol(str(obj))] = _check_type(types, type_token)

    scope = _Scope(dict(domain.predicates), objects)
    init: List[Atom] = []
    for section in _sections(body, "init"):
        for atom in section.children:
            init.append(scope.template(atom, None).ground({}))

    goal: List[Atom] = []
    for section in _sections(body, "goal"):
        positive, negative = scope.literals(section.children[0], None)
        if negative:
            first = section.children[0]
            raise PddlSyntaxError("Negative goal literals are not supported",
                                  getattr(first.meta, "line", None), getattr(first.meta, "column", None))
        goal.extend(t.ground({}) for t in positive)

    return ProblemModel(name, domain.name, objects, AbstractState.of(init), frozenset(goal))


def type_objects(domain: DomainModel, objects: Dict[str, str], type_name: str) -> Sequence[str]:
    """Objects whose declared type is `type_name` or one of its subtypes, sorted."""
    return sorted(o for o, t in objects.items() if domain.is_subtype(t, type_name))
