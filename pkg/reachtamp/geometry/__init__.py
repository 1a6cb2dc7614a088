"""
Planar (vertical-plane) world model: SE(2) poses, convex shapes, a fixed-base
3-link arm and mode-aware collision checking.
"""
