"""
Action-sequence sampler: an epsilon-greedy walk down the abstract tree,
completed by the symbolic planner.
"""

import time
from collections import Counter
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from reachtamp.config import PLANNER_NODE_BUDGET
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.grounding import GroundProblem
from reachtamp.symbolic.model import AbstractState, GroundAction
from reachtamp.symbolic.planner import task_plan
from reachtamp.tamp.trees import ARTNode, AbstractReachabilityTree
from reachtamp.utils.exceptions import GoalUnreachableError, TaskPlanningError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


class PlanCache:
    """Memoised task_plan results (plans or planning failures) for one solve."""

    def __init__(self, problem: GroundProblem, goal: GoalSpec, budget: int = PLANNER_NODE_BUDGET,
                 stats: Optional[Counter] = None):
        self.problem = problem
        self.goal = goal
        self.budget = budget
        self.stats = stats if stats is not None else Counter()
        self._results: Dict[AbstractState, Union[List[GroundAction], TaskPlanningError]] = {}

    def plan(self, state: AbstractState) -> List[GroundAction]:
        result = self._results.get(state)
        if result is None:
            self.stats["task_plan_calls"] += 1
            started = time.perf_counter()
            try:
                result = task_plan(self.problem, state, self.goal, budget=self.budget)
            except TaskPlanningError as e:
                result = e
            self.stats["task_plan_seconds"] += time.perf_counter() - started
            self._results[state] = result
        if isinstance(result, TaskPlanningError):
            raise result
        return list(result)


def randomized_tree_search(tree: AbstractReachabilityTree,
                           epsilon: float,
                           terminate_prob: Optional[float],
                           rng: np.random.Generator) -> Tuple[ARTNode, List[GroundAction]]:
    """
    Walk from the root, choosing children epsilon-greedily by mean reward.

    Each visited node may end the walk with its termination probability
    (`terminate_prob` overrides the per-node value). Unvisited children rank
    above all others; ties are broken uniformly. Dead nodes are never entered.
    """
    node = tree.root
    actions: List[GroundAction] = []
    while True:
        children = [c for c in node.children.values() if not c.dead]
        if not children:
            break
        stop = node.terminate_prob if terminate_prob is None else terminate_prob
        if rng.random() < stop:
            break
        if rng.random() < epsilon:
            child = children[int(rng.integers(len(children)))]
        else:
            best = max(c.value for c in children)
            ties = [c for c in children if c.value == best]
            child = ties[int(rng.integers(len(ties)))]
        actions.append(child.action)
        node = child
    return node, actions


def sample_action_seq(tree: AbstractReachabilityTree,
                      plans: PlanCache,
                      epsilon: float,
                      rng: np.random.Generator,
                      terminate_prob: Optional[float] = None) -> Tuple[List[ARTNode], List[GroundAction]]:
    """
    Returns (n_s, pi): pi = random prefix + planner completion towards the
    cache's goal, and the ART nodes it visits from the root (|n_s| = |pi| + 1).

    A node whose state cannot reach the goal is marked dead and the walk is
    redrawn. Only a proof of unreachability kills a node.

    Raises:
        GoalUnreachableError: the root itself cannot reach the goal
        SearchBudgetExceededError: the planner ran out of nodes on the walk's last state
    """
    while True:
        last, prefix = randomized_tree_search(tree, epsilon, terminate_prob, rng)
        try:
            completion = plans.plan(last.state)
        except GoalUnreachableError as e:
            if last is tree.root:
                raise
            last.dead = True
            logger.debug(f"ART node at depth {len(prefix)} marked dead: {e}")
            continue
        n_s = tree.path_to(last) + tree.extend(last, completion)
        return n_s, prefix + completion
