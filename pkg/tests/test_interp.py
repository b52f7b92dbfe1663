# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Testing Interpolant Propagation Module."""
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from interpolse.errors import PreconditionViolated
from interpolse.formula import FALSE_EXPR, TRUE, Atom, Expr, Formula, Implies
from interpolse.interp import (
    FALSE_MARKER,
    Interpolant,
    PropagationInput,
    abduction,
    backprop,
    closure,
    core,
    path_wp,
    propagate_path,
    separate,
)
from interpolse.lang import Assign, Assume, Error, Halt, Skip, parse_atom, parse_formula
from interpolse.solver import Solver, entails, enumerate_models, equivalent, is_sat
from tests.program_factory import abduction_triple, box, loosened, random_atom

# Context of the abduction example where the x guard is decided: then
# path of t, inputs bounded, store still at its initial values.
EXAMPLE_CONTEXT = "x >= 0 && x <= 1 && t >= 1 && u == 0 && y == 0 && z == 1"


def formula(text: str) -> Formula:
    return parse_formula(text)


def test_closure_is_transitive():
    atoms = formula("a == b && b == c && d == 0").atoms
    assert closure(atoms, {"a"}) == {"a", "b", "c"}
    assert closure(atoms, set()) == set()


@pytest.mark.parametrize(
    "gamma, seed, connected, rest",
    [
        (
            "x > -1 && x < 2 && y == 0 && z == 1",
            {"x"},
            "x >= 0 && x <= 1",
            "y == 0 && z == 1",
        ),
        ("a == b && b == c && d == 0", {"a"}, "a == b && b == c", "d == 0"),
        ("a == b && d == 0", set(), "true", "a == b && d == 0"),
    ],
)
def test_separate(gamma, seed, connected, rest):
    assert separate(formula(gamma), seed) == (formula(connected), formula(rest))


def test_core_follows_path_order():
    assert core(formula("x <= 3 && x <= 5"), formula("x <= 5")) == formula("x <= 5")
    assert core(formula("a == 1 && b == 2"), formula("a >= 0")) == formula("a == 1")


def test_core_of_unsatisfiable_premise():
    result = core(formula("x >= 1 && x <= 0 && y == 1"), formula("z == 3"))
    assert result == formula("x >= 1 && x <= 0")


def test_core_precondition():
    with pytest.raises(PreconditionViolated):
        core(formula("x >= 0"), formula("x >= 1"))


def test_abduction_then_edge():
    psi = formula("x >= -3 && x <= 4 && y - z <= 32")
    result = abduction(formula(EXAMPLE_CONTEXT), parse_atom("x > 0"), psi)
    assert equivalent(result.formula, formula("x > -1 && x < 2 && y < z + 33"))


def test_abduction_else_edge():
    psi = formula("x >= -5 && x <= 2 && y - z >= -1")
    result = abduction(formula(EXAMPLE_CONTEXT), parse_atom("x <= 0"), psi)
    assert equivalent(result.formula, formula("x > -1 && x < 2 && y > z - 2"))


def test_abduction_quoted_example():
    phi = formula("x > -1 && x < 2 && y == 0 && z == 1")
    psi = formula("x > -4 && x < 5 && y < z + 33")
    result = abduction(phi, parse_atom("x > 0"), psi)
    assert equivalent(result.formula, formula("x > -1 && x < 2 && y < z + 33"))


def test_abduction_disjoint_guard_returns_psi():
    psi = formula("y >= 0")
    result = abduction(formula("y == 0"), parse_atom("x > 0"), psi)
    assert result == Interpolant(psi)


def test_abduction_keeps_guard_linked_conclusion():
    phi, e, psi = formula("x == 1 && y == 2"), parse_atom("x >= 1"), formula("x + y >= 3")
    result = abduction(phi, e, psi)
    assert entails(phi, result.formula)
    assert entails(result.formula & e, psi)
    bounds = {"x": (-8, 8), "y": (-8, 8)}
    for model in enumerate_models(phi, bounds):
        assert result.formula.evaluate(model)
    for model in enumerate_models(result.formula & e, bounds):
        assert psi.evaluate(model)


def test_abduction_infeasible_guard():
    result = abduction(formula("x <= 0"), parse_atom("x >= 1"), formula("y == 3"))
    assert result == Interpolant(formula("x <= 0"))


def test_abduction_debug_precondition():
    with pytest.raises(PreconditionViolated):
        abduction(formula("x >= 0"), parse_atom("x >= 1"), formula("x >= 5"), debug=True)


def test_backprop_assign():
    step = PropagationInput(
        formula("d == 35"),
        Assign("d", Expr.of({"d": 1}, 60)),
        Interpolant(formula("d >= 90")),
    )
    assert backprop(step) == Interpolant(formula("d >= 30"))


def test_backprop_infeasible_guard():
    step = PropagationInput(formula("x <= 0"), Assume(parse_atom("x > 0")), FALSE_MARKER)
    assert backprop(step) == Interpolant(formula("x <= 0"))
    equality = PropagationInput(TRUE, Assume(parse_atom("x == 2")), FALSE_MARKER)
    assert backprop(equality) == Interpolant(formula("x != 2"))


def test_backprop_entailed_guard():
    step = PropagationInput(
        formula("x >= 5"), Assume(parse_atom("x > 0")), Interpolant(formula("y == 1"))
    )
    assert backprop(step) == Interpolant(formula("y == 1 && x > 0"))


def test_backprop_undecided_guard_abduces():
    step = PropagationInput(
        formula(EXAMPLE_CONTEXT),
        Assume(parse_atom("x > 0")),
        Interpolant(formula("x >= -3 && x <= 4 && y - z <= 32")),
    )
    result = backprop(step, Solver(), debug=True)
    assert equivalent(result.formula, formula("x >= 0 && x <= 1 && y - z <= 32"))


@pytest.mark.parametrize("stmt", [Skip(), Halt(), Error()])
def test_backprop_passes_through(stmt):
    post = Interpolant(formula("y >= 0"))
    assert backprop(PropagationInput(TRUE, stmt, post)) == post


def test_backprop_rejects_false_below_assignment():
    with pytest.raises(PreconditionViolated):
        backprop(PropagationInput(TRUE, Assign("y", Expr.var("x")), FALSE_MARKER))


def test_propagate_path():
    steps = [
        (formula("x >= 0 && y == 0"), Assume(parse_atom("x > 2"))),
        (formula("x >= 3 && y == 0"), Assign("y", Expr.var("x"))),
    ]
    result = propagate_path(steps, formula("y >= 1"))
    assert len(result) == 3
    assert result[-1] == Interpolant(formula("y >= 1"))
    assert entails(formula("x >= 0 && y == 0"), result[0].formula)
    assert entails(result[0].formula & parse_atom("x > 2"), formula("x >= 1"))


def test_path_wp():
    path = [Assume(parse_atom("x > 0")), Assign("y", Expr.of({"x": 1}, 1))]
    result = path_wp(path, Atom(parse_atom("y > 5")))
    assert result == Implies(Atom(parse_atom("x > 0")), Atom(parse_atom("x > 4")))
    assert path_wp([Assume(parse_atom("x > 0"))], FALSE_EXPR) == Atom(
        parse_atom("x <= 0")
    )
    assert path_wp([], FALSE_EXPR) == FALSE_EXPR


seeds = st.integers(0, 2**32)


@given(seeds)
def test_abduction_generalizes_context(seed):
    phi, e, psi = abduction_triple(random.Random(seed))
    result = abduction(phi, e, psi, debug=True)
    assert entails(phi, result.formula)
    assert entails(result.formula & e, psi)


@given(seeds)
def test_separation_factorizes_models(seed):
    rng = random.Random(seed)
    names = ["x", "y", "z"]
    gamma = Formula(tuple(random_atom(rng, names, 4) for _ in range(rng.randint(1, 4))))
    connected, rest = separate(gamma, {rng.choice(names)})
    assert not connected.variables & rest.variables
    assert sorted(connected.atoms + rest.atoms, key=str) == sorted(gamma.atoms, key=str)

    def count(f: Formula) -> int:
        return len(enumerate_models(f, {n: (-3, 3) for n in f.variables}))

    unused = len(set(names) - gamma.variables)
    everything = len(enumerate_models(gamma, {n: (-3, 3) for n in names}))
    assert everything == count(connected) * count(rest) * 7 ** (unused)


@given(seeds)
def test_core_is_one_minimal(seed):
    rng = random.Random(seed)
    gamma = box(["x", "y"], -5, 5).conjoin(
        Formula(tuple(random_atom(rng, ["x", "y"], 5) for _ in range(3)))
    )
    psi = Formula.of(loosened(rng.choice(gamma.atoms), rng))
    result = core(gamma, psi)
    assert entails(result, psi)
    assert set(result.atoms) <= set(gamma.atoms)
    for index in range(len(result)):
        assert not entails(result.without(index), psi)


@given(seeds)
def test_frame_rule(seed):
    rng = random.Random(seed)
    a = box(["x", "y"], -6, 6) & random_atom(rng, ["x", "y"])
    b = Formula.of(random_atom(rng, ["x", "y"]))
    c = box(["u", "w"], -6, 6) & random_atom(rng, ["u", "w"])
    assume(is_sat(c))
    assert entails(a, b) is entails(c.conjoin(a), c.conjoin(b))


@given(seeds)
def test_frame_rule_drops_disjoint_premise(seed):
    rng = random.Random(seed)
    a = box(["x", "y"], -6, 6) & random_atom(rng, ["x", "y"])
    b = box(["u", "w"], -6, 6) & random_atom(rng, ["u", "w"])
    c = Formula.of(random_atom(rng, ["u", "w"]))
    assume(is_sat(a))
    if entails(a.conjoin(b), c):
        assert entails(b, c)

