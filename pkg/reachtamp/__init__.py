"""
ReachTAMP - task and motion planning over a reachability tree of hybrid states
"""

__version__ = "0.1.0"
