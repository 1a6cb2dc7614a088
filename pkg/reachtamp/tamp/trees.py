"""
Reachability tree (hybrid states) and abstract reachability tree (MCTS
statistics over abstract states).
"""

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from reachtamp.motion.rrt_connect import Trajectory
from reachtamp.symbolic.model import AbstractState, GroundAction, successor
from reachtamp.tamp.modes import Attachment
from reachtamp.tamp.state import HybridState
from reachtamp.utils.exceptions import ConsistencyError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ActionEdge:
    """Non-geometric action: only the abstract state changes."""

    action: GroundAction


@dataclass(frozen=True)
class TransitionEdge:
    """
    Geometric action stored as one edge covering two consecutive transitions:
    a configuration transition along `trajectory` inside the parent mode,
    ending at the switch configuration, then the mode transition that applies
    `attachment` there. The child keeps the switch configuration, so
    classify_edge reports the edge by its final step (MODE); `kinds` lists both.
    """

    action: GroundAction
    attachment: Attachment
    trajectory: Trajectory

    @property
    def kinds(self) -> Tuple["TransitionKind", ...]:
        if len(self.trajectory) <= 1:
            return (TransitionKind.MODE,)
        return TransitionKind.CONFIGURATION, TransitionKind.MODE


@dataclass(frozen=True)
class MotionEdge:
    """Final motion to the goal configuration, mode unchanged."""

    trajectory: Trajectory


Edge = Union[ActionEdge, TransitionEdge, MotionEdge]


class TransitionKind(str, enum.Enum):
    CONFIGURATION = "configuration"
    MODE = "mode"
    NON_GEOMETRIC = "non-geometric"


def classify_edge(parent: HybridState, child: HybridState, edge: Edge) -> TransitionKind:
    """Which transition type an edge realizes (a TransitionEdge by its final mode step); ConsistencyError if none fits."""
    if isinstance(edge, ActionEdge):
        if (not edge.action.is_geometric
                and child.s == successor(parent.s, edge.action)
                and child.sigma == parent.sigma
                and child.q == parent.q):
            return TransitionKind.NON_GEOMETRIC
    elif isinstance(edge, MotionEdge):
        traj = edge.trajectory
        if (child.s == parent.s
                and child.sigma == parent.sigma
                and traj.mode == parent.sigma
                and traj.start == parent.q
                and traj.end == child.q):
            return TransitionKind.CONFIGURATION
    elif isinstance(edge, TransitionEdge):
        traj = edge.trajectory
        if (edge.action.is_geometric
                and edge.action.attachment_change == edge.attachment.pair
                and child.s == successor(parent.s, edge.action)
                and child.sigma == parent.sigma.replace(edge.attachment)
                and traj.mode == parent.sigma
                and traj.start == parent.q
                and traj.end == child.q):
            return TransitionKind.MODE
    raise ConsistencyError(f"Edge {type(edge).__name__} matches no transition type")


@dataclass
class RTNode:
    id: int
    state: HybridState
    parent: Optional[int] = None
    edge: Optional[Edge] = None
    kind: Optional[TransitionKind] = None


@dataclass(frozen=True)
class Solution:
    states: List[HybridState]
    edges: List[Edge]

    def __len__(self) -> int:
        return len(self.edges)


class ReachabilityTree:
    def __init__(self, root: HybridState):
        root.check_consistency()
        self.nodes: List[RTNode] = [RTNode(0, root)]
        self.solution: Optional[int] = None

    @property
    def root(self) -> RTNode:
        return self.nodes[0]

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> RTNode:
        return self.nodes[node_id]

    def add(self, parent_id: int, state: HybridState, edge: Edge) -> int:
        state.check_consistency()
        parent = self.nodes[parent_id]
        kind = classify_edge(parent.state, state, edge)
        node = RTNode(len(self.nodes), state, parent_id, edge, kind)
        self.nodes.append(node)
        return node.id

    def path(self, node_id: int) -> List[RTNode]:
        path = []
        current: Optional[int] = node_id
        while current is not None:
            node = self.nodes[current]
            path.append(node)
            current = node.parent
        path.reverse()
        return path


def extract_solution(rt: ReachabilityTree) -> Solution:
    if rt.solution is None:
        raise ConsistencyError("Reachability tree holds no solution")
    path = rt.path(rt.solution)
    return Solution(states=[n.state for n in path], edges=[n.edge for n in path[1:]])


@dataclass(eq=False)
class ARTNode:
    state: AbstractState
    terminate_prob: float
    parent: Optional["ARTNode"] = None
    action: Optional[GroundAction] = None
    children: Dict[GroundAction, "ARTNode"] = field(default_factory=dict)
    n_visit: int = 0
    r_total: float = 0.0
    rt_nodes: List[int] = field(default_factory=list)
    dead: bool = False

    @property
    def value(self) -> float:
        if self.n_visit == 0:
            return math.inf
        return self.r_total / self.n_visit

    def register(self, rt: ReachabilityTree, node_id: int) -> None:
        """Add an RT node to V_s."""
        if rt[node_id].state.s != self.state:
            raise ConsistencyError(f"RT node {node_id} does not realize abstract state {self.state}")
        self.rt_nodes.append(node_id)


class AbstractReachabilityTree:
    def __init__(self, root: AbstractState, terminate_prob: float):
        self.terminate_prob = terminate_prob
        self.root = ARTNode(root, terminate_prob)
        self.size = 1

    def child(self, node: ARTNode, action: GroundAction) -> ARTNode:
        existing = node.children.get(action)
        if existing is not None:
            return existing
        created = ARTNode(successor(node.state, action), self.terminate_prob, parent=node, action=action)
        node.children[action] = created
        self.size += 1
        return created

    def extend(self, node: ARTNode, plan: Sequence[GroundAction]) -> List[ARTNode]:
        """Follow (creating as needed) the branch for `plan`; returns the nodes after `node`."""
        nodes = []
        for action in plan:
            node = self.child(node, action)
            nodes.append(node)
        return nodes

    def path_to(self, node: ARTNode) -> List[ARTNode]:
        path = []
        current: Optional[ARTNode] = node
        while current is not None:
            path.append(current)
            current = current.parent
        path.reverse()
        return path


def update_tree(n_s: Sequence[ARTNode], reward: float, record_reward: bool = True) -> None:
    if not 0.0 <= reward <= 1.0:
        raise ConsistencyError(f"Reward {reward} outside [0, 1]")
    for node in n_s:
        node.n_visit += 1
        if record_reward:
            node.r_total += reward
