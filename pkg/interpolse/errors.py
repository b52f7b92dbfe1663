# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Exception Hierarchy Module."""


class InterpolseError(Exception):
    """Base class for every error raised by interpolse."""


class ProgramSyntaxError(InterpolseError):
    """Program text does not follow the grammar.

    :param line: 1-based source line of the offending token
    :param message: Description of the problem
    """

    def __init__(self, line: int, message: str):
        """Class initialization method."""
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class UndeclaredVariable(InterpolseError):
    def __init__(self, name: str, line: int | None = None):
        """Class initialization method."""
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"undeclared variable '{name}'{where}")
        self.name = name
        self.line = line


class DuplicateDeclaration(InterpolseError):
    def __init__(self, name: str, line: int | None = None):
        """Class initialization method."""
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"variable '{name}' declared twice{where}")
        self.name = name
        self.line = line


class NonLinearExpression(InterpolseError):
    def __init__(self, location: str):
        """Class initialization method."""
        super().__init__(f"non-linear expression at {location}")
        self.location = location


class AssignToSymbolic(InterpolseError):
    def __init__(self, name: str, line: int | None = None):
        """Class initialization method."""
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"symbolic input '{name}' is read-only{where}")
        self.name = name
        self.line = line


class UnboundVariable(InterpolseError):
    def __init__(self, name: str):
        """Class initialization method."""
        super().__init__(f"no value for variable '{name}'")
        self.name = name


class DomainTooLarge(InterpolseError):
    def __init__(self, size: int, cap: int):
        """Class initialization method."""
        super().__init__(f"enumeration domain of {size} points exceeds cap {cap}")
        self.size = size
        self.cap = cap


class SolverBudgetExceeded(InterpolseError):
    """Branch-and-bound gave up; the query is inconclusive, never unsat."""

    def __init__(self, depth: int):
        """Class initialization method."""
        super().__init__(f"branch-and-bound depth {depth} exceeded")
        self.depth = depth


class PreconditionViolated(InterpolseError):
    pass


class DepthBoundExceeded(InterpolseError):
    def __init__(self, point):
        """Class initialization method."""
        super().__init__(f"loop bound exceeded at {point}")
        self.point = point


class WitnessReplayError(InterpolseError):
    pass


class InvalidMatrix(InterpolseError):
    pass


class SettingsError(InterpolseError):
    pass


class RecordError(InterpolseError):
    pass
