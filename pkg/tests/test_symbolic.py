import numpy as np
import pytest

from reachtamp.domains.nonmonotonic import NONMONOTONIC_DOMAIN
from reachtamp.symbolic.goals import GoalSpec, goal_satisfied
from reachtamp.symbolic.grounding import ground
from reachtamp.symbolic.model import (
    AbstractState,
    ActionKind,
    Atom,
    apply,
    applicable,
    check_attachment_invariant,
    successor,
)
from reachtamp.symbolic.parser import parse_domain, parse_problem, type_objects
from reachtamp.symbolic.planner import (
    BREADTH_FIRST,
    GREEDY,
    format_plan,
    h_add,
    parse_plan,
    replay,
    task_plan,
)
from reachtamp.utils.exceptions import (
    ArityMismatchError,
    GoalUnreachableError,
    NotApplicableError,
    PddlSyntaxError,
    SearchBudgetExceededError,
    UndeclaredSymbolError,
    ValidationError,
)
from tests.conftest import TOY_DOMAIN


class TestParser:
    def test_kitchen_schemas_are_classified(self, kitchen_domain):
        kinds = {s.name: s.kind for s in kitchen_domain.schemas}
        assert kinds == {
            "pick": ActionKind.GEOMETRIC,
            "place": ActionKind.GEOMETRIC,
            "wash": ActionKind.NON_GEOMETRIC,
            "cook": ActionKind.NON_GEOMETRIC,
        }
        assert kitchen_domain.constants["robot"] == "agent"
        assert kitchen_domain.constants["sink"] == "surface"

    def test_syntax_error_has_position(self):
        with pytest.raises(PddlSyntaxError) as info:
            parse_domain("(define (domain broken)\n  (:predicates (p))\n  (:action)\n)")
        assert info.value.line is not None

    def test_undeclared_predicate(self):
        text = TOY_DOMAIN.replace("(and (q)))", "(and (s)))", 1)
        with pytest.raises(UndeclaredSymbolError) as info:
            parse_domain(text)
        assert info.value.symbol == "s"

    def test_arity_mismatch(self):
        text = TOY_DOMAIN.replace("(and (q)))", "(and (q p)))", 1)
        with pytest.raises(ArityMismatchError) as info:
            parse_domain(text)
        assert (info.value.expected, info.value.got) == (0, 1)

    def test_negative_goal_rejected(self):
        domain = parse_domain(TOY_DOMAIN)
        problem = "(define (problem n) (:domain toy) (:init (p)) (:goal (and (not (p)))))"
        with pytest.raises(PddlSyntaxError):
            parse_problem(problem, domain)

    def test_wrong_domain_name(self):
        domain = parse_domain(TOY_DOMAIN)
        with pytest.raises(UndeclaredSymbolError):
            parse_problem("(define (problem n) (:domain other) (:init) (:goal (and (p))))", domain)

    def test_comments_and_case_are_ignored(self):
        domain = parse_domain("; header\n" + TOY_DOMAIN.upper())
        assert {s.name for s in domain.schemas} == {"a", "b"}

    def test_type_hierarchy(self):
        domain = parse_domain(NONMONOTONIC_DOMAIN)
        objects = {"c1": "colored", "g1": "blocker", "storage": "surface", "robot": "agent"}
        assert type_objects(domain, objects, "block") == ["c1", "g1"]
        assert domain.is_subtype("colored", "object")
        assert not domain.is_subtype("surface", "block")


class TestGrounding:
    def test_kitchen_one_action_count(self, kitchen_ground):
        names = sorted(str(a) for a in kitchen_ground.actions)
        # pick/place over {dish, sink, stove}, plus wash and cook
        assert len(names) == 8
        assert "(wash f1)" in names
        assert kitchen_ground.movables == ("f1",)

    def test_attachment_change(self, kitchen_ground):
        assert kitchen_ground.action("pick", "f1", "dish").attachment_change == ("f1", "robot")
        assert kitchen_ground.action("place", "f1", "stove").attachment_change == ("f1", "stove")
        with pytest.raises(ValidationError):
            kitchen_ground.action("wash", "f1").attachment_change

    def test_unknown_action(self, kitchen_ground):
        with pytest.raises(ValidationError):
            kitchen_ground.action("fly", "f1")

    def test_static_preconditions_prune(self):
        domain = parse_domain("""
        (define (domain s)
          (:types thing)
          (:predicates (ok ?x - thing) (done ?x - thing))
          (:action go :parameters (?x - thing) :precondition (and (ok ?x)) :effect (and (done ?x))))
        """)
        problem = parse_problem("(define (problem s1) (:domain s) (:objects a b - thing) "
                                "(:init (ok a)) (:goal (and (done a))))", domain)
        assert [str(a) for a in ground(domain, problem).actions] == ["(go a)"]


class TestModel:
    def test_apply_checks_preconditions(self, kitchen_ground):
        s0 = kitchen_ground.init
        wash = kitchen_ground.action("wash", "f1")
        assert not applicable(s0, wash)
        with pytest.raises(NotApplicableError):
            apply(s0, wash)
        # successor skips the check
        assert Atom.of("clean", "f1") in successor(s0, wash)

    def test_pick_changes_abstract_attachments(self, kitchen_ground):
        s1 = apply(kitchen_ground.init, kitchen_ground.action("pick", "f1", "dish"))
        assert s1.abstract_attachments == frozenset({("f1", "robot")})
        assert Atom.of("handempty") not in s1

    def test_attachment_invariant(self, kitchen_ground):
        check_attachment_invariant(kitchen_ground.init, ["f1"])
        broken = AbstractState.of(kitchen_ground.init.atoms | {Atom.of("attached", "f1", "sink")})
        with pytest.raises(ValidationError):
            check_attachment_invariant(broken, ["f1"])


class TestPlanner:
    def test_kitchen_one_shortest_plan(self, kitchen_ground):
        plan = task_plan(kitchen_ground, kitchen_ground.init, kitchen_ground.goal, strategy=BREADTH_FIRST)
        assert [str(a) for a in plan] == [
            "(pick f1 dish)", "(place f1 sink)", "(wash f1)",
            "(pick f1 sink)", "(place f1 stove)", "(cook f1)",
        ]

    def test_greedy_plan_replays_to_goal(self, kitchen_ground):
        plan = task_plan(kitchen_ground, kitchen_ground.init, kitchen_ground.goal, strategy=GREEDY)
        final = replay(kitchen_ground.init, plan)[-1]
        assert kitchen_ground.goal <= final.atoms

    def test_satisfied_goal_gives_empty_plan(self, kitchen_ground):
        goal = GoalSpec.of([Atom.of("handempty")])
        assert goal_satisfied(kitchen_ground.init, goal)
        assert task_plan(kitchen_ground, kitchen_ground.init, goal) == []

    def test_toy_plan_and_heuristic(self, toy_ground):
        plan = task_plan(toy_ground, toy_ground.init, toy_ground.goal)
        assert format_plan(plan) == "(a)\n(b)\n"
        assert h_add(toy_ground.init.atoms, frozenset({Atom.of("r")}), toy_ground.actions) == 2

    @pytest.mark.parametrize("strategy", [GREEDY, BREADTH_FIRST])
    def test_unreachable_goal(self, toy_ground, strategy):
        # (p) is deleted on the way to (r) and nothing restores it
        goal = [Atom.of("p"), Atom.of("r")]
        with pytest.raises(GoalUnreachableError):
            task_plan(toy_ground, toy_ground.init, goal, strategy=strategy)

    def test_budget_exhaustion_is_distinguishable(self, kitchen_ground):
        with pytest.raises(SearchBudgetExceededError):
            task_plan(kitchen_ground, kitchen_ground.init, kitchen_ground.goal, budget=1)

    def test_parse_plan_round_trip(self, kitchen_ground):
        plan = task_plan(kitchen_ground, kitchen_ground.init, kitchen_ground.goal)
        assert parse_plan("; plan\n" + format_plan(plan), kitchen_ground) == plan

    def test_parse_plan_rejects_garbage(self, kitchen_ground):
        with pytest.raises(PddlSyntaxError):
            parse_plan("pick f1 dish", kitchen_ground)


def _random_strips(rng: np.random.Generator, predicates: int = 5, actions: int = 6) -> str:
    names = [f"p{i}" for i in range(predicates)]

    def pick(k):
        return list(rng.choice(names, size=k, replace=False))

    lines = [f"(define (domain r) (:predicates {' '.join(f'({n})' for n in names)})"]
    for a in range(actions):
        pre = pick(int(rng.integers(0, 3)))
        add = pick(int(rng.integers(1, 3)))
        delete = [n for n in pick(int(rng.integers(0, 2))) if n not in add]
        effect = " ".join([f"({n})" for n in add] + [f"(not ({n}))" for n in delete])
        lines.append(f"(:action a{a} :parameters () :precondition (and {' '.join(f'({n})' for n in pre)}) "
                     f":effect (and {effect}))")
    lines.append(")")
    return "\n".join(lines)


def test_greedy_agrees_with_breadth_first_on_random_models():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        domain = parse_domain(_random_strips(rng))
        init = " ".join(f"(p{i})" for i in range(5) if rng.random() < 0.4)
        goal = " ".join(f"(p{i})" for i in rng.choice(5, size=2, replace=False))
        problem = parse_problem(f"(define (problem x) (:domain r) (:init {init}) (:goal (and {goal})))", domain)
        grounded = ground(domain, problem)

        outcomes = {}
        for strategy in (GREEDY, BREADTH_FIRST):
            try:
                plan = task_plan(grounded, grounded.init, grounded.goal, strategy=strategy)
            except GoalUnreachableError:
                outcomes[strategy] = None
                continue
            assert grounded.goal <= replay(grounded.init, plan)[-1].atoms
            outcomes[strategy] = len(plan)
        assert (outcomes[GREEDY] is None) == (outcomes[BREADTH_FIRST] is None)
        if outcomes[GREEDY] is not None:
            assert outcomes[BREADTH_FIRST] <= outcomes[GREEDY]
