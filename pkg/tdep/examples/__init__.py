"""Examples for the tdep package

Each example can be run as a script and exposes its measures and
results as module level objects. validation.py runs the longer
statistical experiments.
"""
