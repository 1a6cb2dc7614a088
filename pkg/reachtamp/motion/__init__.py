"""
Single-mode motion planning (RRT-Connect) between two configurations.
"""
