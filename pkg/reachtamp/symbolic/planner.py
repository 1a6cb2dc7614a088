"""
Off-the-shelf style STRIPS planner used to complete sampled action prefixes.

Greedy best-first search with the additive relaxation heuristic (h_add),
ties broken by insertion order, plus an exact breadth-first mode used as a
test oracle. Both modes distinguish a proven-unreachable goal from an
exhausted node budget.
"""

import heapq
import itertools
import math
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from reachtamp.config import PLANNER_NODE_BUDGET
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.grounding import GroundProblem
from reachtamp.symbolic.model import AbstractState, Atom, GroundAction, applicable, apply, successor
from reachtamp.utils.exceptions import GoalUnreachableError, PddlSyntaxError, SearchBudgetExceededError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

GREEDY = "greedy"
BREADTH_FIRST = "bfs"

GoalLike = Union[GoalSpec, Iterable[Atom]]


def _goal_atoms(goal: GoalLike) -> FrozenSet[Atom]:
    return goal.atoms if isinstance(goal, GoalSpec) else frozenset(goal)


def h_add(atoms: FrozenSet[Atom], goal: FrozenSet[Atom], actions: Sequence[GroundAction]) -> float:
    """Additive relaxation: sum of independent atom costs, delete lists ignored."""
    cost: Dict[Atom, int] = dict.fromkeys(atoms, 0)
    changed = True
    while changed:
        changed = False
        for action in actions:
            c = 1
            for p in action.pre_pos:
                pc = cost.get(p)
                if pc is None:
                    break
                c += pc
            else:
                for q in action.add:
                    if cost.get(q, math.inf) > c:
                        cost[q] = c
                        changed = True
    total = 0
    for g in goal:
        gc = cost.get(g)
        if gc is None:
            return math.inf
        total += gc
    return total


def _backtrack(parents: Dict[AbstractState, Optional[Tuple[AbstractState, GroundAction]]],
               state: AbstractState) -> List[GroundAction]:
    plan: List[GroundAction] = []
    link = parents[state]
    while link is not None:
        state, action = link
        plan.append(action)
        link = parents[state]
    plan.reverse()
    return plan


def _greedy(problem: GroundProblem, s0: AbstractState, goal: FrozenSet[Atom], budget: int) -> List[GroundAction]:
    actions = problem.actions
    h0 = h_add(s0.atoms, goal, actions)
    if h0 == math.inf:
        raise GoalUnreachableError("Goal unreachable even under delete relaxation")

    counter = itertools.count()
    frontier = [(h0, next(counter), s0)]
    parents: Dict[AbstractState, Optional[Tuple[AbstractState, GroundAction]]] = {s0: None}
    expansions = 0
    while frontier:
        _, _, state = heapq.heappop(frontier)
        if goal <= state.atoms:
            return _backtrack(parents, state)
        expansions += 1
        if expansions > budget:
            raise SearchBudgetExceededError(expansions - 1)
        for action in actions:
            if not applicable(state, action):
                continue
            child = successor(state, action)
            if child in parents:
                continue
            parents[child] = (state, action)
            h = h_add(child.atoms, goal, actions)
            if h < math.inf:
                heapq.heappush(frontier, (h, next(counter), child))
    raise GoalUnreachableError(f"Search space exhausted after {expansions} expansions")


def _breadth_first(problem: GroundProblem, s0: AbstractState, goal: FrozenSet[Atom], budget: int) -> List[GroundAction]:
    if goal <= s0.atoms:
        return []
    parents: Dict[AbstractState, Optional[Tuple[AbstractState, GroundAction]]] = {s0: None}
    queue = deque([s0])
    expansions = 0
    while queue:
        state = queue.popleft()
        expansions += 1
        if expansions > budget:
            raise SearchBudgetExceededError(expansions - 1)
        for action in problem.actions:
            if not applicable(state, action):
                continue
            child = successor(state, action)
            if child in parents:
                continue
            parents[child] = (state, action)
            if goal <= child.atoms:
                return _backtrack(parents, child)
            queue.append(child)
    raise GoalUnreachableError(f"Search space exhausted after {expansions} expansions")


def task_plan(problem: GroundProblem, s0: AbstractState, goal: GoalLike, *,
              strategy: str = GREEDY, budget: int = PLANNER_NODE_BUDGET) -> List[GroundAction]:
    """
    Find an action sequence from s0 to a state containing the goal atoms.

    Args:
        problem (GroundProblem): ground model supplying the actions
        s0 (AbstractState): start state
        goal: GoalSpec or iterable of goal atoms
        strategy (str): "greedy" (h_add GBFS) or "bfs" (shortest plan)
        budget (int): maximum number of node expansions

    Returns:
        list: ground actions, empty when s0 already satisfies the goal

    Raises:
        GoalUnreachableError: no plan exists
        SearchBudgetExceededError: budget ran out first
    """
    atoms = _goal_atoms(goal)
    if atoms <= s0.atoms:
        return []
    if strategy == GREEDY:
        return _greedy(problem, s0, atoms, budget)
    if strategy == BREADTH_FIRST:
        return _breadth_first(problem, s0, atoms, budget)
    raise ValueError(f"Unknown planner strategy '{strategy}'")


def replay(s0: AbstractState, plan: Sequence[GroundAction]) -> List[AbstractState]:
    """States visited by a plan; raises NotApplicableError on an invalid step."""
    states = [s0]
    for action in plan:
        states.append(apply(states[-1], action))
    return states


def format_plan(plan: Sequence[GroundAction]) -> str:
    return "".join(f"{a}\n" for a in plan)


def parse_plan(text: str, problem: GroundProblem) -> List[GroundAction]:
    plan = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise PddlSyntaxError(f"Plan step must look like '(name arg ...)': {line!r}", lineno, 1)
        name, *args = line[1:-1].split()
        plan.append(problem.action(name, *args))
    return plan
