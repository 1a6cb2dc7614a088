"""Experiment harness: trial suites, CDF and variant comparison."""
