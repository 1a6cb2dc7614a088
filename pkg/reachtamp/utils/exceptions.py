"""
Custom exceptions for the ReachTAMP toolkit.
"""

from typing import Optional


class ReachTampError(Exception):
    """Base exception for ReachTAMP"""
    pass


class PddlError(ReachTampError):
    """Error while reading a PDDL domain or problem"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


class PddlSyntaxError(PddlError):
    """Text does not match the supported PDDL subset"""
    pass


class UndeclaredSymbolError(PddlError):
    """Predicate, type, object or variable used without declaration"""

    def __init__(self, symbol: str, kind: str, line: Optional[int] = None, column: Optional[int] = None):
        self.symbol = symbol
        self.kind = kind
        super().__init__(f"Undeclared {kind} '{symbol}'", line, column)


class ArityMismatchError(PddlError):
    """Predicate used with the wrong number of arguments"""

    def __init__(self, symbol: str, expected: int, got: int,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.symbol = symbol
        self.expected = expected
        self.got = got
        super().__init__(f"Predicate '{symbol}' expects {expected} arguments, got {got}", line, column)


class NotApplicableError(ReachTampError):
    """Action applied in a state that violates its precondition"""
    pass


class TaskPlanningError(ReachTampError):
    """Symbolic planner found no plan"""
    pass


class GoalUnreachableError(TaskPlanningError):
    """Search space exhausted: no plan exists"""
    pass


class SearchBudgetExceededError(TaskPlanningError):
    """Node budget ran out before a plan was found"""

    def __init__(self, expansions: int):
        self.expansions = expansions
        super().__init__(f"Node budget exhausted after {expansions} expansions")


class GeometryError(ReachTampError):
    """Error in the planar world model"""
    pass


class InvalidShapeError(GeometryError):
    """Shape parameters are degenerate or not convex"""
    pass


class JointLimitError(GeometryError):
    """Configuration outside the arm's joint limits"""
    pass


class KinematicChainError(GeometryError):
    """Attachment chain is cyclic or references an unknown body"""
    pass


class MotionPlanningError(ReachTampError):
    """Single-mode motion planning failed"""
    pass


class StartInCollisionError(MotionPlanningError):
    """Start configuration is in collision"""
    pass


class GoalInCollisionError(MotionPlanningError):
    """Goal configuration is in collision"""
    pass


class IterationsExhaustedError(MotionPlanningError):
    """RRT-Connect ran out of iterations"""
    pass


class TransitionContractError(ReachTampError):
    """Mode pair does not differ in exactly one attachment"""
    pass


class ConsistencyError(ReachTampError):
    """Reachability tree invariant violated"""
    pass


class SolveTimeoutError(ReachTampError):
    """Search budget expired without a solution"""
    pass


class InfeasibleGoalError(ReachTampError):
    """Goal is abstractly unreachable from the initial state"""
    pass


class ValidationError(ReachTampError):
    """Error during input validation"""
    pass


class ConfigurationError(ReachTampError):
    """Error in application configuration"""
    pass


class FileFormatError(ReachTampError):
    """Bundle, scene, solution or results file is malformed"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
