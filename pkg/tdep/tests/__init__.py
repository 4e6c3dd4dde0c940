"""Tests for the tdep package

The behaviour of tdep is specified via tests. Each tdep module has an
associated test module and each tdep class an associated TestCase.
The test suites provide AbstractTestCases for abstract base classes.
Long running experiments are skipped unless TDEP_SLOW_TESTS is set.
"""
