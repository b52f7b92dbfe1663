# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Linear Integer Arithmetic Solver Module.

Satisfiability of a conjunction is decided per variable-connected
component: unit-coefficient equalities are substituted away, the rest
goes through Fourier-Motzkin elimination on integer rows, a model is
read back by exact rational back-substitution and fractional values are
removed by branch-and-bound. Disequalities are only split on when the
candidate model violates one.
"""

import itertools
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from interpolse.errors import (
    DomainTooLarge,
    InterpolseError,
    SolverBudgetExceeded,
    UnboundVariable,
)
from interpolse.formula import (
    BoolExpr,
    Expr,
    Formula,
    LinAtom,
    Model,
    Relation,
)

logger = logging.getLogger(__name__)

DEFAULT_BRANCH_DEPTH = 64
DEFAULT_ENUMERATE_CAP = 1_000_000
SEARCH_NODES_PER_LEVEL = 32

Row = tuple[dict[str, int], int]


@dataclass(frozen=True)
class Sat:
    model: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self) -> bool:
        return False


SatResult = Sat | Unsat
UNSAT = Unsat()


def components(atoms: Sequence[LinAtom]) -> list[list[LinAtom]]:
    """Group atoms into variable-connected components.

    Components are listed in order of their first atom; atoms keep their
    relative order inside a component.

    :param atoms: Atoms of a conjunction
    :return: List of components
    """
    parent: dict[str, str] = {}

    def find(name: str) -> str:
        while parent[name] != name:
            parent[name] = parent[parent[name]]
            name = parent[name]
        return name

    for atom in atoms:
        names = [name for name, _ in atom.terms]
        for name in names:
            parent.setdefault(name, name)
        for other in names[1:]:
            root_a, root_b = find(names[0]), find(other)
            if root_a != root_b:
                parent[root_b] = root_a

    groups: dict[str, list[LinAtom]] = {}
    constant: list[LinAtom] = []
    for atom in atoms:
        if not atom.terms:
            constant.append(atom)
            continue
        groups.setdefault(find(atom.terms[0][0]), []).append(atom)

    result = list(groups.values())
    if constant:
        result.insert(0, constant)
    return result


def _row(atom: LinAtom) -> Row:
    return dict(atom.terms), atom.bound


def _tighten(coeffs: dict[str, int], bound: int) -> Row:
    coeffs = {name: c for name, c in coeffs.items() if c}
    if not coeffs:
        return coeffs, bound
    g = math.gcd(*coeffs.values())
    if g > 1:
        coeffs = {name: c // g for name, c in coeffs.items()}
        bound = bound // g
    return coeffs, bound


def _dedup(rows: Iterable[Row]) -> list[Row] | None:
    """Keep the tightest bound per coefficient vector.

    :return: Deduplicated rows, or None when a constant row is violated
    """
    best: dict[tuple, int] = {}
    for coeffs, bound in rows:
        if not coeffs:
            if bound < 0:
                return None
            continue
        key = tuple(sorted(coeffs.items()))
        if key not in best or bound < best[key]:
            best[key] = bound
    for key, bound in best.items():
        mirror = tuple((name, -c) for name, c in key)
        if mirror in best and bound + best[mirror] < 0:
            return None
    return [(dict(key), bound) for key, bound in best.items()]


def _rational_model(rows: list[Row]) -> dict[str, Fraction] | None:
    """Fourier-Motzkin elimination followed by back-substitution.

    Derived rows are gcd-normalized with floor tightening, which keeps
    every integer solution. A returned model satisfies the rows over the
    rationals and may hold fractional values.

    :param rows: Rows ``sum(c * v) <= bound`` with integer data
    :return: Rational model, or None when no integer solution exists
    """
    current = _dedup(rows)
    if current is None:
        return None
    remaining = sorted({name for coeffs, _ in current for name in coeffs})
    levels: list[tuple[str, list[Row]]] = []

    while remaining:

        def cost(name: str) -> tuple[int, str]:
            pos = sum(1 for coeffs, _ in current if coeffs.get(name, 0) > 0)
            neg = sum(1 for coeffs, _ in current if coeffs.get(name, 0) < 0)
            return pos * neg - pos - neg, name

        var = min(remaining, key=cost)
        remaining.remove(var)
        upper = [row for row in current if row[0].get(var, 0) > 0]
        lower = [row for row in current if row[0].get(var, 0) < 0]
        rest = [row for row in current if var not in row[0]]
        levels.append((var, upper + lower))

        derived = list(rest)
        for (p_coeffs, p_bound), (n_coeffs, n_bound) in itertools.product(
            upper, lower
        ):
            a, b = p_coeffs[var], -n_coeffs[var]
            coeffs = {name: c * b for name, c in p_coeffs.items()}
            for name, c in n_coeffs.items():
                coeffs[name] = coeffs.get(name, 0) + c * a
            coeffs.pop(var, None)
            derived.append(_tighten(coeffs, p_bound * b + n_bound * a))

        current = _dedup(derived)
        if current is None:
            return None

    model: dict[str, Fraction] = {}
    for var, var_rows in reversed(levels):
        low: Fraction | None = None
        high: Fraction | None = None
        for coeffs, bound in var_rows:
            a = coeffs[var]
            rest_value = sum(
                (c * model[name] for name, c in coeffs.items() if name != var),
                Fraction(0),
            )
            limit = Fraction(bound - rest_value) / a
            if a > 0:
                high = limit if high is None else min(high, limit)
            else:
                low = limit if low is None else max(low, limit)
        model[var] = _pick_value(low, high)
    return model


def _pick_value(low: Fraction | None, high: Fraction | None) -> Fraction:
    """Integer closest to zero inside [low, high], else the fractional low end."""
    low_int = math.ceil(low) if low is not None else None
    high_int = math.floor(high) if high is not None else None
    if low_int is None and high_int is None:
        return Fraction(0)
    if low_int is None:
        return Fraction(min(0, high_int))
    if high_int is None:
        return Fraction(max(0, low_int))
    if low_int <= high_int:
        return Fraction(min(max(0, low_int), high_int))
    return low


class Solver:
    """Decision procedures over conjunctions of linear integer atoms.

    Each query may also visit at most ``32 * branch_depth`` branch nodes.

    :param branch_depth: Maximum nesting of branch-and-bound and
        disequality splits before a query is declared inconclusive
    :param enumerate_cap: Largest domain :meth:`enumerate_models` walks
    """

    def __init__(
        self,
        branch_depth: int = DEFAULT_BRANCH_DEPTH,
        enumerate_cap: int = DEFAULT_ENUMERATE_CAP,
    ):
        """Class initialization method."""
        self.branch_depth = branch_depth
        self.enumerate_cap = enumerate_cap
        self.calls = 0
        self._nodes = 0
        self._cache: dict[tuple[LinAtom, ...], dict[str, int] | None] = {}

    def _solve(self, atoms: Sequence[LinAtom]) -> dict[str, int] | None:
        key = tuple(atoms)
        if key in self._cache:
            return self._cache[key]
        self._nodes = 0
        result = self._solve_uncached(list(atoms))
        self._cache[key] = result
        return result

    def _solve_uncached(self, atoms: list[LinAtom]) -> dict[str, int] | None:
        if any(atom.is_false for atom in atoms):
            return None

        variables = sorted({name for atom in atoms for name, _ in atom.terms})
        eqs = [a for a in atoms if a.rel is Relation.EQ]
        others = [a for a in atoms if a.rel is not Relation.EQ]
        substitutions: list[tuple[str, Expr]] = []

        while True:
            pivot = None
            for atom in eqs:
                unit = [(name, c) for name, c in atom.terms if abs(c) == 1]
                if unit:
                    pivot = atom, unit[0]
                    break
            if pivot is None:
                break

            atom, (name, c) = pivot
            rest = {n: -c * k for n, k in atom.terms if n != name}
            replacement = Expr.of(rest, c * atom.bound)
            substitutions.append((name, replacement))

            eqs = [a.substitute(name, replacement) for a in eqs if a is not atom]
            others = [a.substitute(name, replacement) for a in others]
            if any(a.is_false for a in eqs + others):
                return None
            eqs = [a for a in eqs if not a.is_true]
            others = [a for a in others if not a.is_true]

        rows = [_row(a) for a in others if a.rel is Relation.LE]
        for atom in eqs:
            rows.append(_row(atom))
            rows.append(({n: -c for n, c in atom.terms}, -atom.bound))
        nes = [a for a in others if a.rel is Relation.NE]

        model = self._branch(rows, nes, 0)
        if model is None:
            return None

        substituted = {name for name, _ in substitutions}
        for name in variables:
            if name not in substituted:
                model.setdefault(name, 0)
        for name, replacement in reversed(substitutions):
            model[name] = replacement.evaluate(model)

        if not all(atom.evaluate(model) for atom in atoms):
            raise InterpolseError("solver produced a model that violates its input")
        return model

    def _branch(
        self, rows: list[Row], nes: list[LinAtom], depth: int
    ) -> dict[str, int] | None:
        self._nodes += 1
        if (
            depth > self.branch_depth
            or self._nodes > SEARCH_NODES_PER_LEVEL * max(self.branch_depth, 1)
        ):
            raise SolverBudgetExceeded(self.branch_depth)

        rational = _rational_model(rows)
        if rational is None:
            return None

        split: list[Row] | None = None
        for name in sorted(rational):
            value = rational[name]
            if value.denominator != 1:
                below = ({name: 1}, math.floor(value))
                above = ({name: -1}, -math.ceil(value))
                split = [below, above]
                break

        model = {name: int(value) for name, value in rational.items()}
        if split is None:
            for atom in nes:
                if any(name not in model for name, _ in atom.terms):
                    for name, _ in atom.terms:
                        model.setdefault(name, 0)
                if not atom.evaluate(model):
                    below = LinAtom.make(atom.lhs, Relation.LT, atom.rhs)
                    above = LinAtom.make(atom.lhs, Relation.GT, atom.rhs)
                    split = [_row(below), _row(above)]
                    break
            else:
                return model

        inconclusive: SolverBudgetExceeded | None = None
        for extra in split:
            try:
                found = self._branch(rows + [extra], nes, depth + 1)
            except SolverBudgetExceeded as error:
                inconclusive = error
                continue
            if found is not None:
                return found
        if inconclusive is not None:
            raise inconclusive
        return None

    def is_sat(self, formula: Formula) -> SatResult:
        """Decide a conjunction and extract an integer model.

        :param formula: Conjunction to decide
        :return: Sat with a verified model, or Unsat
        :raises SolverBudgetExceeded: Branch-and-bound depth exhausted
        """
        self.calls += 1
        if formula.is_false:
            return UNSAT
        model: dict[str, int] = {}
        for component in components(formula.atoms):
            found = self._solve(component)
            if found is None:
                return UNSAT
            model.update(found)
        return Sat(model)

    def is_sat_with(self, formula: Formula, atom: LinAtom) -> bool:
        """Decide ``formula and atom`` for a formula already known satisfiable.

        Only the atoms connected to the new atom are re-solved.

        :param formula: Satisfiable conjunction
        :param atom: Atom to add
        :return: True if the extension is satisfiable
        :raises SolverBudgetExceeded: Branch-and-bound depth exhausted
        """
        self.calls += 1
        if atom.is_true:
            return True
        if atom.is_false:
            return False
        return self._solve(self._touching(formula.atoms, [atom])) is not None

    def _touching(
        self, atoms: Sequence[LinAtom], extra: Sequence[LinAtom]
    ) -> list[LinAtom]:
        """Atoms transitively sharing variables with ``extra``, plus ``extra``."""
        reach = set().union(*(a.variables for a in extra))
        selected: list[LinAtom] = []
        pending = list(atoms)
        changed = True
        while changed:
            changed = False
            keep = []
            for atom in pending:
                if atom.variables & reach:
                    reach |= atom.variables
                    selected.append(atom)
                    changed = True
                else:
                    keep.append(atom)
            pending = keep
        order = {atom: index for index, atom in enumerate(atoms)}
        selected.sort(key=order.__getitem__)
        return selected + list(extra)

    def entails(self, f: Formula, g: Formula) -> bool:
        """Decide whether every model of ``f`` satisfies ``g``.

        Each atom of ``g`` is checked by refuting its integer negation
        under ``f``. An inconclusive check counts as not entailed.

        :param f: Premise
        :param g: Conclusion
        :return: True if f entails g
        """
        self.calls += 1
        if g.is_true or f.is_false:
            return True
        try:
            for component in components(f.atoms):
                if self._solve(component) is None:
                    return True
        except SolverBudgetExceeded:
            logger.debug("premise satisfiability inconclusive in entailment")

        for atom in g.atoms:
            if atom.is_false:
                return False
            if atom in f.atoms:
                continue
            for alternative in atom.negate():
                try:
                    if self._solve(self._touching(f.atoms, [alternative])) is not None:
                        return False
                except SolverBudgetExceeded:
                    logger.debug("entailment check inconclusive for %s", alternative)
                    return False
        return True

    def enumerate_models(
        self,
        f: "Formula | BoolExpr | LinAtom",
        bounds: Mapping[str, tuple[int, int]],
        cap: int | None = None,
    ) -> list[dict[str, int]]:
        return enumerate_models(f, bounds, self.enumerate_cap if cap is None else cap)


def is_sat(formula: Formula, branch_depth: int = DEFAULT_BRANCH_DEPTH) -> SatResult:
    return Solver(branch_depth).is_sat(formula)


def entails(f: Formula, g: Formula, branch_depth: int = DEFAULT_BRANCH_DEPTH) -> bool:
    return Solver(branch_depth).entails(f, g)


def equivalent(f: Formula, g: Formula) -> bool:
    solver = Solver()
    return solver.entails(f, g) and solver.entails(g, f)


def substitute(f, var: str, e: Expr):
    """Replace ``var`` by ``e`` in a formula, atom, expression or BoolExpr.

    :param f: Object to rewrite
    :param var: Variable to replace
    :param e: Linear replacement
    :return: Object of the same kind, re-canonicalized
    """
    return f.substitute(var, e)


def free_vars(f) -> frozenset[str]:
    return f.variables


def negate(atom: LinAtom) -> tuple[LinAtom, ...]:
    return atom.negate()


def canonicalize(atom: LinAtom) -> LinAtom:
    return atom.canonical()


def eval_formula(f: "Formula | BoolExpr | LinAtom", model: Model) -> bool:
    """Evaluate with exact integers.

    :param f: Formula, atom or BoolExpr
    :param model: Assignment covering every variable of ``f``
    :return: Truth value
    :raises UnboundVariable: A variable of ``f`` has no value
    """
    return f.evaluate(model)


def enumerate_models(
    f: "Formula | BoolExpr | LinAtom",
    bounds: Mapping[str, tuple[int, int]],
    cap: int = DEFAULT_ENUMERATE_CAP,
) -> list[dict[str, int]]:
    """Brute-force every assignment within bounds that satisfies ``f``.

    Assignments range over all variables named in ``bounds`` and come out
    in lexicographic order of sorted variable names.

    :param f: Formula, atom or BoolExpr
    :param bounds: Inclusive integer interval per variable
    :param cap: Largest domain size walked
    :return: Satisfying assignments
    :raises UnboundVariable: A variable of ``f`` has no interval
    :raises DomainTooLarge: The domain holds more than ``cap`` points
    """
    for name in sorted(f.variables):
        if name not in bounds:
            raise UnboundVariable(name)

    names = sorted(bounds)
    ranges = [range(bounds[n][0], bounds[n][1] + 1) for n in names]
    size = math.prod(len(r) for r in ranges)
    if size > cap:
        raise DomainTooLarge(size, cap)

    models = []
    for values in itertools.product(*ranges):
        model = dict(zip(names, values))
        if f.evaluate(model):
            models.append(model)
    return models
