"""
Reachability-tree TAMP search: modes, hybrid states, the abstract and
concrete trees, and the solve loop.
"""
