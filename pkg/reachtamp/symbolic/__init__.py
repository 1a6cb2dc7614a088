"""
Symbolic layer: PDDL-subset parsing, STRIPS transitions and the task planner.
"""
