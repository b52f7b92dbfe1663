# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Shared fixtures and hypothesis profiles."""
import os

import pytest
from hypothesis import settings

from interpolse.benchmarks import gen_abduction_example, gen_bitsum, gen_shortest_path
from interpolse.lang import Program, parse_program
from interpolse.solver import Solver
from tests.program_factory import BRANCH_PROGRAM

settings.register_profile("ci", derandomize=True, deadline=None, max_examples=200)
settings.register_profile("dev", deadline=None, max_examples=50)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def solver() -> Solver:
    return Solver()


@pytest.fixture
def shortest_path():
    """Factory for the four-node shortest path program with a given bound."""

    def build(bound: int = 90) -> Program:
        return parse_program(gen_shortest_path(4, "four-node", bound))

    return build


@pytest.fixture
def bitsum():
    def build(bits: int) -> Program:
        return parse_program(gen_bitsum(bits))

    return build


@pytest.fixture
def abduction_example() -> Program:
    return parse_program(gen_abduction_example())


@pytest.fixture
def branch_program() -> Program:
    return parse_program(BRANCH_PROGRAM)
