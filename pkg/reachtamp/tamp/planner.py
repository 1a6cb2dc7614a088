"""
Task planning layer: the outer solve loop tying the three layers together.
"""

import time
from collections import Counter
from typing import List, Optional

import numpy as np

from reachtamp.geometry.scene import Scene, state_collision_free
from reachtamp.symbolic.goals import GoalSpec
from reachtamp.symbolic.grounding import GroundProblem
from reachtamp.tamp.attachments import AttachmentSampler
from reachtamp.tamp.params import SearchParams
from reachtamp.tamp.sampler import PlanCache, sample_action_seq
from reachtamp.tamp.ss_layer import goal_reached, ss_layer
from reachtamp.tamp.state import HybridState
from reachtamp.tamp.trees import (
    ARTNode,
    AbstractReachabilityTree,
    ReachabilityTree,
    Solution,
    extract_solution,
    update_tree,
)
from reachtamp.utils.exceptions import (
    GoalUnreachableError,
    InfeasibleGoalError,
    SearchBudgetExceededError,
    SolveTimeoutError,
    ValidationError,
)
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


class SearchStats(Counter):
    """Counters accumulated over one solve."""

    KEYS = (
        "iterations",
        "mp_calls",
        "collision_checks",
        "goal_candidates_drawn",
        "goal_candidates_rejected",
        "task_plan_calls",
        "task_plan_seconds",
        "art_size",
        "rt_size",
        "rewards_pushed",
        "task_plan_budget_failures",
    )

    def summary(self) -> dict:
        return {key: self.get(key, 0) for key in self.KEYS}


def solve(x_init: HybridState,
          goal: GoalSpec,
          scene: Scene,
          problem: GroundProblem,
          params: Optional[SearchParams] = None,
          stats: Optional[Counter] = None) -> Solution:
    """
    Search for a hybrid plan from x_init into the goal set.

    Raises:
        InfeasibleGoalError: the symbolic planner proves the goal unreachable from x_init.s
        SolveTimeoutError: wall-clock or iteration budget exhausted, or the task planner
            runs out of nodes at the initial state
    """
    params = params or SearchParams()
    stats = stats if stats is not None else SearchStats()
    rng = np.random.default_rng(params.seed)

    x_init.check_consistency()
    if not state_collision_free(scene, x_init.sigma, x_init.q):
        raise ValidationError("Initial state is in collision")

    rt = ReachabilityTree(x_init)
    art = AbstractReachabilityTree(x_init.s, params.terminate_prob)
    art.root.register(rt, rt.root.id)

    if goal_reached(x_init, goal):
        rt.solution = rt.root.id
        return extract_solution(rt)

    plans = PlanCache(problem, goal, params.planner_budget, stats)
    try:
        plans.plan(x_init.s)
    except GoalUnreachableError as e:
        raise InfeasibleGoalError(f"Goal is unreachable in the symbolic model: {e}") from e
    except SearchBudgetExceededError as e:
        raise SolveTimeoutError(f"Task planner budget of {params.planner_budget} nodes exhausted "
                                f"at the initial state: {e}") from e

    sampler = AttachmentSampler(scene, x_init, rng, stats)
    started = time.monotonic()
    deadline = started + params.timeout
    iteration = 0
    try:
        while rt.solution is None:
            if time.monotonic() > deadline:
                raise SolveTimeoutError(f"No solution within {params.timeout:.1f}s ({iteration} iterations)")
            if params.max_iterations is not None and iteration >= params.max_iterations:
                raise SolveTimeoutError(f"No solution within {params.max_iterations} iterations")
            iteration += 1
            stats["iterations"] += 1

            try:
                n_s, pi = sample_action_seq(art, plans, params.epsilon, rng)
            except SearchBudgetExceededError:
                # counts as a failed iteration; the caps above still bound the run
                stats["task_plan_budget_failures"] += 1
                continue
            rewards = []
            for _ in range(params.k_ss):
                rewards.extend(ss_layer(pi, n_s, goal, rt, scene, params, rng, sampler, stats, deadline))
                if rt.solution is not None:
                    break
            push_rewards(n_s, rewards, params, stats)
            if iteration % 25 == 0:
                logger.debug(f"Iteration {iteration}: RT {len(rt)} nodes, ART {art.size} nodes")
    finally:
        stats["art_size"] = art.size
        stats["rt_size"] = len(rt)

    logger.info(f"Solved in {iteration} iterations, {time.monotonic() - started:.2f}s, RT {len(rt)} nodes")
    return extract_solution(rt)


def push_rewards(n_s: List[ARTNode], rewards: List[float], params: SearchParams, stats: Counter) -> None:
    """
    Back up the mean of one iteration's rewards along the sampled ART path.
    Visits are always counted; the reward sum only moves when the variant uses rewards.
    """
    if not rewards:
        return
    stats["rewards_pushed"] += len(rewards)
    update_tree(n_s, sum(rewards) / len(rewards), record_reward=params.uses_reward)
