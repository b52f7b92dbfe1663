# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Interpolant Propagation Module.

Conjunctive backward propagation of interpolants across one statement,
abduction for guards the context does not decide, deletion-based cores,
variable separation, and the disjunctive path weakest precondition used
only as a test oracle.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from interpolse.errors import PreconditionViolated, SolverBudgetExceeded
from interpolse.formula import (
    FALSE_EXPR,
    Atom,
    BoolConst,
    BoolExpr,
    Formula,
    Implies,
    LinAtom,
)
from interpolse.lang import Assign, Assume, Error, Halt, Skip, Stmt
from interpolse.solver import Solver

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Interpolant:
    """Conjunctive abstraction that keeps a subtree safe."""

    formula: Formula

    def __and__(self, other: "Interpolant") -> "Interpolant":
        return Interpolant(self.formula.conjoin(other.formula))

    def __str__(self) -> str:
        return str(self.formula)


class FalseMarker:
    """Result of an infeasible node."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FALSE"


FALSE_MARKER = FalseMarker()


@dataclass(frozen=True)
class PropagationInput:
    """Arguments of one backward step.

    :param context: Evaluated constraint store of the parent state
    :param stmt: Statement between parent and child
    :param post: Interpolant of the child, or FALSE_MARKER if the child
        was infeasible
    """

    context: Formula
    stmt: Stmt
    post: Interpolant | FalseMarker


def _satisfiable(formula: Formula, solver: Solver, default: bool) -> bool:
    try:
        return bool(solver.is_sat(formula))
    except SolverBudgetExceeded:
        logger.debug("satisfiability of %s inconclusive", formula)
        return default


def closure(atoms: Iterable[LinAtom], seed: Iterable[str]) -> frozenset[str]:
    """Grow a variable set until no atom links it to a further variable.

    :param atoms: Atoms defining the links
    :param seed: Initial variables
    :return: Connectivity closure of ``seed``
    """
    reach = set(seed)
    pending = list(atoms)
    changed = bool(reach)
    while changed:
        changed = False
        rest = []
        for atom in pending:
            if atom.variables & reach:
                reach |= atom.variables
                changed = True
            else:
                rest.append(atom)
        pending = rest
    return frozenset(reach)


def separate(gamma: Formula, variables: Iterable[str]) -> tuple[Formula, Formula]:
    """Split a conjunction into the part connected to ``variables`` and the rest.

    Both parts keep path order and share no variable.

    :param gamma: Conjunction to split
    :param variables: Seed variables
    :return: Connected part and separated remainder
    """
    reach = closure(gamma.atoms, variables)
    connected = tuple(a for a in gamma.atoms if a.variables & reach)
    rest = tuple(a for a in gamma.atoms if not a.variables & reach)
    return Formula(connected), Formula(rest)


def core(
    gamma: Formula,
    psi: Formula,
    solver: Solver | None = None,
    check: bool = True,
) -> Formula:
    """Deletion-based minimization of ``gamma`` with respect to ``psi``.

    Atoms are tried oldest first; an atom is dropped when the remainder
    still entails ``psi``. When ``gamma`` is satisfiable, atoms with no
    variable path to ``psi`` are dropped up front, which is what the
    deletion loop would do with them anyway.

    :param gamma: Premise conjunction in path order
    :param psi: Conclusion
    :param solver: Solver to use, a fresh one by default
    :param check: Verify that gamma entails psi first
    :return: 1-minimal sub-conjunction of gamma entailing psi
    :raises PreconditionViolated: gamma does not entail psi
    """
    solver = solver or Solver()
    if check and not solver.entails(gamma, psi):
        raise PreconditionViolated(f"core: {gamma} does not entail {psi}")

    atoms = list(gamma.atoms)
    if _satisfiable(gamma, solver, default=False):
        reach = closure(atoms, psi.variables)
        atoms = [a for a in atoms if a.variables & reach]

    index = 0
    while index < len(atoms):
        remainder = Formula(tuple(atoms[:index] + atoms[index + 1 :]))
        if solver.entails(remainder, psi):
            del atoms[index]
        else:
            index += 1
    return Formula(tuple(atoms))


def abduction(
    phi: Formula,
    e: LinAtom,
    psi: Formula,
    solver: Solver | None = None,
    debug: bool = False,
) -> Interpolant:
    """Generalize ``phi`` into a premise R with ``phi |= R`` and ``R and e |= psi``.

    The core of ``e and phi`` (guard scanned first, guard excluded from the
    result) is split by the connectivity closure of the guard's variables
    taken over the core and ``psi`` together. If ``psi`` has nothing in
    that closure it is returned unchanged; otherwise the connected part of
    the core is kept and joined with the separated part of ``psi``.

    :param phi: Context of the state
    :param e: Guard atom
    :param psi: Interpolant after the guard
    :param solver: Solver to use, a fresh one by default
    :param debug: Check the precondition ``phi and e |= psi``
    :return: Conjunctive interpolant
    :raises PreconditionViolated: Debug check failed
    """
    solver = solver or Solver()
    guarded = Formula((e,)).conjoin(phi)
    if debug and not solver.entails(guarded, psi):
        raise PreconditionViolated(f"abduction: {phi} && {e} does not entail {psi}")

    if not _satisfiable(guarded, solver, default=True):
        return Interpolant(Formula((e.complement(),)))

    minimal = core(guarded, psi, solver, check=False)
    phi_bar = Formula(tuple(a for a in minimal.atoms if a != e))

    reach = closure(phi_bar.atoms + psi.atoms, e.variables)
    phi_v, _ = separate(phi_bar, reach)
    psi_v, psi_rest = separate(psi, reach)

    if psi_v.is_true:
        return Interpolant(psi)
    return Interpolant(phi_v.conjoin(psi_rest))


def backprop(
    step: PropagationInput,
    solver: Solver | None = None,
    debug: bool = False,
) -> Interpolant:
    """Carry an interpolant backwards across one statement.

    :param step: Parent context, statement and child result
    :param solver: Solver to use, a fresh one by default
    :param debug: Check the abduction precondition
    :return: Interpolant of the parent with respect to this child
    :raises PreconditionViolated: Child result FALSE on a non-assume step,
        or the debug check failed
    """
    solver = solver or Solver()
    stmt, post = step.stmt, step.post

    if isinstance(stmt, Assume):
        e = stmt.atom
        if post is FALSE_MARKER:
            return Interpolant(Formula((e.complement(),)))
        if solver.entails(step.context, Formula((e,))):
            return Interpolant(post.formula & e)
        if debug and not solver.entails(step.context & e, post.formula):
            raise PreconditionViolated(
                f"backprop: {step.context} && {e} does not entail {post}"
            )
        return abduction(step.context, e, post.formula, solver)

    if post is FALSE_MARKER:
        raise PreconditionViolated(f"infeasible child below '{stmt}'")
    if isinstance(stmt, Assign):
        return Interpolant(post.formula.substitute(stmt.var, stmt.expr))
    if isinstance(stmt, (Skip, Error, Halt)):
        return post
    raise TypeError(f"unknown statement {stmt!r}")


def propagate_path(
    steps: Sequence[tuple[Formula, Stmt]],
    post: Formula,
    solver: Solver | None = None,
) -> list[Interpolant]:
    """Propagate a terminal interpolant back along one feasible path.

    :param steps: Context before each statement, with the statement
    :param post: Interpolant at the end of the path
    :param solver: Solver to use
    :return: Interpolant before each step, followed by ``post``
    """
    solver = solver or Solver()
    result = [Interpolant(post)]
    for context, stmt in reversed(steps):
        result.append(backprop(PropagationInput(context, stmt, result[-1]), solver))
    result.reverse()
    return result


def path_wp(path: Sequence[Stmt], post: BoolExpr) -> BoolExpr:
    """Weakest precondition of a path, possibly disjunctive.

    Used to cross-check conjunctive propagation; the engine never calls it.

    :param path: Statements in execution order
    :param post: Postcondition
    :return: Weakest precondition
    """
    result = post
    for stmt in reversed(path):
        if isinstance(stmt, Assign):
            result = result.substitute(stmt.var, stmt.expr)
        elif isinstance(stmt, Assume):
            if isinstance(result, BoolConst) and result == FALSE_EXPR:
                result = Atom(stmt.atom.complement())
            else:
                result = Implies(Atom(stmt.atom), result)
    return result
