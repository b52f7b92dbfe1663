# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Concrete Execution Module."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass

from interpolse.errors import UnboundVariable
from interpolse.lang import Assign, Assume, Error, Halt, Program, ProgramPoint, Skip
from interpolse.settings import Settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HitError:
    point: ProgramPoint
    store: dict[str, int]
    path: tuple[int, ...]


@dataclass(frozen=True)
class HitHalt:
    store: dict[str, int]
    path: tuple[int, ...]


@dataclass(frozen=True)
class Blocked:
    """A one-way ``assume`` did not hold for the input."""

    point: ProgramPoint
    path: tuple[int, ...]


@dataclass(frozen=True)
class BudgetExhausted:
    point: ProgramPoint
    path: tuple[int, ...]


ConcreteOutcome = HitError | HitHalt | Blocked | BudgetExhausted


def execute_concrete(
    program: Program,
    inputs: Mapping[str, int],
    step_budget: int = Settings.step_budget,
) -> ConcreteOutcome:
    """Run a program on concrete inputs.

    Branches are total, so at most one outgoing ``assume`` holds at each
    point. The returned path lists the indices of the transitions taken.

    :param program: Program to run
    :param inputs: Integer value of every symbolic variable
    :param step_budget: Maximum number of transitions taken
    :return: Outcome of the run
    """
    for name in program.symbolic_names:
        if name not in inputs:
            raise UnboundVariable(name)

    env: dict[str, int] = {name: inputs[name] for name in program.symbolic_names}
    env.update({var.name: var.initial for var in program.program_vars})
    system = program.system
    point = system.start
    path: list[int] = []

    def store() -> dict[str, int]:
        return {name: env[name] for name in program.program_names}

    while True:
        if len(path) >= step_budget:
            logger.debug("step budget %d exhausted at %s", step_budget, point)
            return BudgetExhausted(point, tuple(path))

        taken = None
        for transition in system.outgoing(point):
            stmt = transition.stmt
            if isinstance(stmt, Assume):
                if stmt.atom.evaluate(env):
                    taken = transition
                    break
            else:
                taken = transition
                break

        if taken is None:
            return Blocked(point, tuple(path))

        stmt = taken.stmt
        if isinstance(stmt, Error):
            return HitError(point, store(), tuple(path))
        if isinstance(stmt, Halt):
            return HitHalt(store(), tuple(path))
        if isinstance(stmt, Assign):
            env[stmt.var] = stmt.expr.evaluate(env)
        elif not isinstance(stmt, (Assume, Skip)):
            raise TypeError(f"unknown statement {stmt!r}")

        path.append(taken.index)
        point = taken.target
