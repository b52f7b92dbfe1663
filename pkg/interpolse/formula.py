# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Linear Expressions, Atoms and Formulas Module.

Every constraint in interpolse (contexts, interpolants, guards and the
safety property) is a conjunction of linear integer atoms held by
:class:`Formula`. :class:`BoolExpr` trees exist only for the disjunctive
weakest-precondition oracle and the brute-force evaluator.
"""

import enum
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from interpolse.errors import UnboundVariable

Model = Mapping[str, int]


def _normalize_terms(coeffs: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((name, c) for name, c in coeffs.items() if c != 0))


@dataclass(frozen=True)
class Expr:
    """Linear integer expression: sum of coefficient-variable terms plus a constant.

    Terms are kept sorted by variable name with zero coefficients removed,
    so structural equality is semantic equality.
    """

    terms: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @classmethod
    def of(cls, coeffs: Mapping[str, int], const: int = 0) -> "Expr":
        return cls(_normalize_terms(coeffs), const)

    @classmethod
    def var(cls, name: str, coeff: int = 1) -> "Expr":
        return cls.of({name: coeff})

    @classmethod
    def constant(cls, value: int) -> "Expr":
        return cls((), value)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def coeff(self, name: str) -> int:
        for var, c in self.terms:
            if var == name:
                return c
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.terms)

    def __add__(self, other: "Expr") -> "Expr":
        coeffs = self.as_dict()
        for name, c in other.terms:
            coeffs[name] = coeffs.get(name, 0) + c
        return Expr.of(coeffs, self.const + other.const)

    def __neg__(self) -> "Expr":
        return self.scale(-1)

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def scale(self, factor: int) -> "Expr":
        return Expr.of({n: c * factor for n, c in self.terms}, self.const * factor)

    def substitute(self, name: str, replacement: "Expr") -> "Expr":
        """Replace every occurrence of a variable with an expression.

        :param name: Variable to replace
        :param replacement: Expression taking its place
        :return: New expression
        """
        c = self.coeff(name)
        if c == 0:
            return self
        rest = Expr.of({n: k for n, k in self.terms if n != name}, self.const)
        return rest + replacement.scale(c)

    def substitute_all(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        """Simultaneously replace several variables.

        :param mapping: Variable to replacement expression
        :return: New expression
        """
        result = Expr.constant(self.const)
        for name, c in self.terms:
            term = mapping.get(name)
            result = result + (term.scale(c) if term is not None else Expr.var(name, c))
        return result

    def evaluate(self, model: Model) -> int:
        total = self.const
        for name, c in self.terms:
            if name not in model:
                raise UnboundVariable(name)
            total += c * model[name]
        return total

    def __str__(self) -> str:
        parts: list[str] = []
        for name, c in self.terms:
            magnitude = abs(c)
            text = name if magnitude == 1 else f"{magnitude}*{name}"
            if not parts:
                parts.append(text if c > 0 else f"-{text}")
            else:
                parts.append(f"+ {text}" if c > 0 else f"- {text}")
        if self.const or not parts:
            if not parts:
                parts.append(str(self.const))
            else:
                parts.append(f"+ {self.const}" if self.const > 0 else f"- {-self.const}")
        return " ".join(parts)


class Relation(enum.Enum):
    EQ = "=="
    NE = "!="
    LE = "<="
    LT = "<"
    GE = ">="
    GT = ">"

    def negated(self) -> "Relation":
        return {
            Relation.EQ: Relation.NE,
            Relation.NE: Relation.EQ,
            Relation.LE: Relation.GT,
            Relation.LT: Relation.GE,
            Relation.GE: Relation.LT,
            Relation.GT: Relation.LE,
        }[self]


@dataclass(frozen=True)
class LinAtom:
    """Canonical linear atom ``sum(c_i * v_i) rel bound`` with rel in {==, !=, <=}.

    Build atoms through :meth:`make`; it absorbs strict inequalities,
    divides by the coefficient gcd (tightening the bound of ``<=``) and
    makes the leading coefficient of ``==`` and ``!=`` positive. Constant
    atoms collapse to :data:`TRUE_ATOM` or :data:`FALSE_ATOM`.
    """

    terms: tuple[tuple[str, int], ...]
    rel: Relation
    bound: int

    @classmethod
    def make(cls, lhs: Expr, rel: Relation, rhs: Expr) -> "LinAtom":
        diff = lhs - rhs
        coeffs = dict(diff.terms)
        k = -diff.const

        if rel is Relation.LT:
            rel, k = Relation.LE, k - 1
        elif rel is Relation.GE:
            coeffs, rel, k = {n: -c for n, c in coeffs.items()}, Relation.LE, -k
        elif rel is Relation.GT:
            coeffs, rel, k = {n: -c for n, c in coeffs.items()}, Relation.LE, -k - 1

        if not coeffs:
            holds = {
                Relation.LE: 0 <= k,
                Relation.EQ: k == 0,
                Relation.NE: k != 0,
            }[rel]
            return TRUE_ATOM if holds else FALSE_ATOM

        g = math.gcd(*coeffs.values())
        if rel is Relation.LE:
            k = k // g
        elif k % g:
            return FALSE_ATOM if rel is Relation.EQ else TRUE_ATOM
        else:
            k = k // g
        terms = _normalize_terms({n: c // g for n, c in coeffs.items()})

        if rel is not Relation.LE and terms[0][1] < 0:
            terms = tuple((n, -c) for n, c in terms)
            k = -k

        return cls(terms, rel, k)

    @classmethod
    def relation(cls, lhs: Expr, rel: Relation | str, rhs: Expr | int) -> "LinAtom":
        if isinstance(rel, str):
            rel = Relation(rel)
        if isinstance(rhs, int):
            rhs = Expr.constant(rhs)
        return cls.make(lhs, rel, rhs)

    @property
    def lhs(self) -> Expr:
        return Expr(self.terms, 0)

    @property
    def rhs(self) -> Expr:
        return Expr.constant(self.bound)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.terms)

    @property
    def is_true(self) -> bool:
        return self == TRUE_ATOM

    @property
    def is_false(self) -> bool:
        return self == FALSE_ATOM

    def canonical(self) -> "LinAtom":
        return LinAtom.make(self.lhs, self.rel, self.rhs)

    def substitute(self, name: str, replacement: Expr) -> "LinAtom":
        if name not in self.variables:
            return self
        return LinAtom.make(self.lhs.substitute(name, replacement), self.rel, self.rhs)

    def substitute_all(self, mapping: Mapping[str, Expr]) -> "LinAtom":
        if not self.variables & mapping.keys():
            return self
        return LinAtom.make(self.lhs.substitute_all(mapping), self.rel, self.rhs)

    def evaluate(self, model: Model) -> bool:
        value = self.lhs.evaluate(model)
        if self.rel is Relation.LE:
            return value <= self.bound
        if self.rel is Relation.EQ:
            return value == self.bound
        return value != self.bound

    def negate(self) -> tuple["LinAtom", ...]:
        """Integer negation as a disjunction of atoms.

        ``!(t <= k)`` is ``t >= k+1``; ``!(t == k)`` needs the two
        alternatives ``t <= k-1`` and ``t >= k+1``; ``!(t != k)`` is
        ``t == k``.

        :return: Alternatives whose disjunction is the negation
        """
        if self.is_true:
            return (FALSE_ATOM,)
        if self.is_false:
            return (TRUE_ATOM,)
        t = self.lhs
        if self.rel is Relation.LE:
            return (LinAtom.make(t, Relation.GT, self.rhs),)
        if self.rel is Relation.NE:
            return (LinAtom.make(t, Relation.EQ, self.rhs),)
        return (
            LinAtom.make(t, Relation.LT, self.rhs),
            LinAtom.make(t, Relation.GT, self.rhs),
        )

    def complement(self) -> "LinAtom":
        """Single-atom negation, using ``!=`` for equalities.

        :return: Atom equivalent to the negation
        """
        if self.rel is Relation.EQ:
            return LinAtom(self.terms, Relation.NE, self.bound)
        return self.negate()[0]

    def __str__(self) -> str:
        if self.is_true:
            return "true"
        if self.is_false:
            return "false"
        if self.rel is Relation.LE and all(c < 0 for _, c in self.terms):
            return f"{-self.lhs} >= {-self.bound}"
        return f"{self.lhs} {self.rel.value} {self.bound}"


TRUE_ATOM = LinAtom((), Relation.LE, 0)
FALSE_ATOM = LinAtom((), Relation.LE, -1)


@dataclass(frozen=True)
class Formula:
    """Conjunction of linear atoms in path order.

    True atoms are dropped and canonical duplicates collapse onto their
    first position. The empty conjunction is ``true``.
    """

    atoms: tuple[LinAtom, ...] = field(default=())

    def __post_init__(self):
        seen: set[LinAtom] = set()
        kept: list[LinAtom] = []
        for atom in self.atoms:
            if atom.is_true or atom in seen:
                continue
            seen.add(atom)
            kept.append(atom)
        object.__setattr__(self, "atoms", tuple(kept))

    @classmethod
    def of(cls, *atoms: LinAtom) -> "Formula":
        return cls(tuple(atoms))

    @property
    def variables(self) -> frozenset[str]:
        result: set[str] = set()
        for atom in self.atoms:
            result.update(atom.variables)
        return frozenset(result)

    @property
    def is_true(self) -> bool:
        return not self.atoms

    @property
    def is_false(self) -> bool:
        return FALSE_ATOM in self.atoms

    def __iter__(self) -> Iterator[LinAtom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms

    def __and__(self, other: "Formula | LinAtom") -> "Formula":
        if isinstance(other, LinAtom):
            return Formula(self.atoms + (other,))
        return Formula(self.atoms + other.atoms)

    def conjoin(self, *others: "Formula") -> "Formula":
        atoms = list(self.atoms)
        for other in others:
            atoms.extend(other.atoms)
        return Formula(tuple(atoms))

    def without(self, index: int) -> "Formula":
        return Formula(self.atoms[:index] + self.atoms[index + 1 :])

    def substitute(self, name: str, replacement: Expr) -> "Formula":
        return Formula(tuple(a.substitute(name, replacement) for a in self.atoms))

    def substitute_all(self, mapping: Mapping[str, Expr]) -> "Formula":
        return Formula(tuple(a.substitute_all(mapping) for a in self.atoms))

    def evaluate(self, model: Model) -> bool:
        return all(atom.evaluate(model) for atom in self.atoms)

    def tightened(self) -> "Formula":
        """Drop ``<=`` atoms implied by a tighter atom over the same terms.

        The result is equivalent; only the first position of each kept
        atom matters for order.

        :return: Equivalent formula without dominated bounds
        """
        tightest: dict[tuple, int] = {}
        equal: dict[tuple, int] = {}
        for atom in self.atoms:
            if atom.rel is Relation.LE:
                best = tightest.get(atom.terms)
                tightest[atom.terms] = atom.bound if best is None else min(best, atom.bound)
            elif atom.rel is Relation.EQ:
                equal[atom.terms] = atom.bound

        kept: list[LinAtom] = []
        emitted: set[tuple] = set()
        for atom in self.atoms:
            if atom.rel is Relation.LE:
                if atom.terms in emitted:
                    continue
                bound = tightest[atom.terms]
                if atom.terms in equal and equal[atom.terms] <= bound:
                    continue
                emitted.add(atom.terms)
                kept.append(LinAtom(atom.terms, Relation.LE, bound))
            else:
                kept.append(atom)
        return Formula(tuple(kept))

    def __str__(self) -> str:
        if not self.atoms:
            return "true"
        return " && ".join(str(atom) for atom in self.atoms)


TRUE = Formula()
FALSE = Formula((FALSE_ATOM,))


class BoolExpr:
    """Boolean combination of linear atoms (oracle-only representation)."""

    def evaluate(self, model: Model) -> bool:
        raise NotImplementedError

    def substitute(self, name: str, replacement: Expr) -> "BoolExpr":
        raise NotImplementedError

    @property
    def variables(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class BoolConst(BoolExpr):
    value: bool

    def evaluate(self, model: Model) -> bool:
        return self.value

    def substitute(self, name: str, replacement: Expr) -> BoolExpr:
        return self

    @property
    def variables(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Atom(BoolExpr):
    atom: LinAtom

    def evaluate(self, model: Model) -> bool:
        return self.atom.evaluate(model)

    def substitute(self, name: str, replacement: Expr) -> BoolExpr:
        return Atom(self.atom.substitute(name, replacement))

    @property
    def variables(self) -> frozenset[str]:
        return self.atom.variables

    def __str__(self) -> str:
        return str(self.atom)


@dataclass(frozen=True)
class And(BoolExpr):
    items: tuple[BoolExpr, ...]

    def evaluate(self, model: Model) -> bool:
        return all(item.evaluate(model) for item in self.items)

    def substitute(self, name: str, replacement: Expr) -> BoolExpr:
        return And(tuple(i.substitute(name, replacement) for i in self.items))

    @property
    def variables(self) -> frozenset[str]:
        return frozenset().union(*(i.variables for i in self.items))

    def __str__(self) -> str:
        return "(" + " && ".join(str(i) for i in self.items) + ")" if self.items else "true"


@dataclass(frozen=True)
class Or(BoolExpr):
    items: tuple[BoolExpr, ...]

    def evaluate(self, model: Model) -> bool:
        return any(item.evaluate(model) for item in self.items)

    def substitute(self, name: str, replacement: Expr) -> BoolExpr:
        return Or(tuple(i.substitute(name, replacement) for i in self.items))

    @property
    def variables(self) -> frozenset[str]:
        return frozenset().union(*(i.variables for i in self.items))

    def __str__(self) -> str:
        return "(" + " || ".join(str(i) for i in self.items) + ")" if self.items else "false"


@dataclass(frozen=True)
class Not(BoolExpr):
    item: BoolExpr

    def evaluate(self, model: Model) -> bool:
        return not self.item.evaluate(model)

    def substitute(self, name: str, replacement: Expr) -> BoolExpr:
        return Not(self.item.substitute(name, replacement))

    @property
    def variables(self) -> frozenset[str]:
        return self.item.variables

    def __str__(self) -> str:
        return f"!{self.item}"


@dataclass(frozen=True)
class Implies(BoolExpr):
    premise: BoolExpr
    conclusion: BoolExpr

    def evaluate(self, model: Model) -> bool:
        return not self.premise.evaluate(model) or self.conclusion.evaluate(model)

    def substitute(self, name: str, replacement: Expr) -> BoolExpr:
        return Implies(
            self.premise.substitute(name, replacement),
            self.conclusion.substitute(name, replacement),
        )

    @property
    def variables(self) -> frozenset[str]:
        return self.premise.variables | self.conclusion.variables

    def __str__(self) -> str:
        return f"({self.premise} -> {self.conclusion})"


TRUE_EXPR = BoolConst(True)
FALSE_EXPR = BoolConst(False)


def as_bool_expr(formula: "Formula | LinAtom | BoolExpr") -> BoolExpr:
    """Lift a conjunction (or a single atom) into a BoolExpr tree.

    :param formula: Formula, atom or BoolExpr
    :return: Equivalent BoolExpr
    """
    if isinstance(formula, BoolExpr):
        return formula
    if isinstance(formula, LinAtom):
        return Atom(formula)
    if formula.is_true:
        return TRUE_EXPR
    return And(tuple(Atom(a) for a in formula.atoms))


def disjunction(atoms: Iterable[LinAtom]) -> BoolExpr:
    items = tuple(Atom(a) for a in atoms)
    return items[0] if len(items) == 1 else Or(items)
