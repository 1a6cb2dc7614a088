"""
Benchmark generators (kitchen, non-monotonic, blocktower), problem bundles
and the independent solution validator.
"""
