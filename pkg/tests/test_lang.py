# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Testing Program Language Module."""
import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from interpolse.benchmarks import gen_abduction_example, gen_bitsum, gen_shortest_path
from interpolse.errors import (
    AssignToSymbolic,
    DuplicateDeclaration,
    NonLinearExpression,
    ProgramSyntaxError,
    UndeclaredVariable,
)
from interpolse.formula import Expr, Formula
from interpolse.lang import (
    Assign,
    Assume,
    CondAnd,
    CondAtom,
    Error,
    Halt,
    IfStmt,
    ProgramPoint,
    SymbolicVar,
    format_program,
    parse_atom,
    parse_formula,
    parse_program,
    to_transition_system,
    tokenize,
)
from interpolse.solver import is_sat
from tests.program_factory import random_program


def test_tokenize():
    tokens = tokenize("sym x // input\nif (x >= -1) { error }")
    assert [t.kind for t in tokens[:3]] == ["kw", "ident", "kw"]
    assert [t.text for t in tokens[4:8]] == ["x", ">=", "-", "1"]
    assert tokens[2].line == 2
    assert tokens[-1].kind == "eof"


def test_tokenize_rejects_unknown_character():
    with pytest.raises(ProgramSyntaxError) as error:
        tokenize("var x = 0\nx = x % 2")
    assert error.value.line == 2


def test_declarations(branch_program):
    program = parse_program(
        "sym a in [-2, 5]\nsym b\nvar p = -3\nensure (p >= 0)\np = a + b\n"
    )
    assert program.symbolic_vars == (SymbolicVar("a", -2, 5), SymbolicVar("b"))
    assert program.program_names == ("p",)
    assert program.initial_store == {"p": Expr.constant(-3)}
    assert program.safety == parse_formula("p >= 0")
    assert branch_program.safety.is_true


def test_branch_program_lowering(branch_program):
    system = branch_program.system
    assert system.start == ProgramPoint(1)
    assert [p.id for p in system.points] == list(range(1, 9))
    assert [str(t) for t in system.transitions] == [
        "L1 -> L2: assume(x >= 1)",
        "L1 -> L8: assume(x <= 0)",
        "L2 -> L3: y = x",
        "L3 -> L4: assume(y >= 0)",
        "L3 -> L6: assume(y <= -1)",
        "L4 -> L5: halt",
        "L6 -> L7: error",
        "L8 -> L3: y = -x",
    ]
    assert system.branch_points == (ProgramPoint(1), ProgramPoint(3))
    assert branch_program.targets == {ProgramPoint(6)}
    assert not system.loop_heads


def test_bounds_become_leading_assumes():
    program = parse_program("sym a in [0, 3]\nvar p = 0\np = a\n")
    first, second = program.system.transitions[:2]
    assert first.stmt == Assume(parse_atom("a >= 0"))
    assert second.stmt == Assume(parse_atom("a <= 3"))
    assert len(program.system.outgoing(program.system.start)) == 1
    assert isinstance(program.system.transitions[-1].stmt, Halt)


def test_while_records_loop_head():
    program = parse_program("var i = 0\nwhile (i < 3) { i = i + 1 }\n")
    (head,) = program.system.loop_heads
    assert head == program.system.start
    body, leave = program.system.outgoing(head)
    assert body.stmt == Assume(parse_atom("i <= 2"))
    assert leave.stmt == Assume(parse_atom("i >= 3"))
    (increment,) = program.system.outgoing(body.target)
    assert increment.stmt == Assign("i", Expr.of({"i": 1}, 1))
    assert increment.target == head


def test_compound_conditions_share_continuations():
    program = parse_program(
        "sym x\nsym y\nvar p = 0\nif (x > 0 && !(y > 0 || y < -5)) { p = 1 }\n"
    )
    assumes = [t for t in program.system.transitions if isinstance(t.stmt, Assume)]
    assert len(assumes) == 6
    assigns = [t for t in program.system.transitions if isinstance(t.stmt, Assign)]
    assert len(assigns) == 1
    assert program.body[0].cond == CondAnd(
        CondAtom(parse_atom("x > 0")),
        program.body[0].cond.right,
    )


def test_else_if_chain():
    program = parse_program(
        "sym x\nvar p = 0\nif (x == 1) { p = 1 } else if (x == 2) { p = 2 } else { p = 3 }"
    )
    statement = program.body[0]
    assert isinstance(statement, IfStmt)
    assert isinstance(statement.orelse[0], IfStmt)
    assert len(program.system.branch_points) == 2


def test_assert_lowers_to_error_edge():
    program = parse_program("sym x\nassert (x != 4)\n")
    errors = [t for t in program.system.transitions if isinstance(t.stmt, Error)]
    assert len(errors) == 1
    (branch,) = program.system.branch_points
    keep, fail = program.system.outgoing(branch)
    assert keep.stmt == Assume(parse_atom("x != 4"))
    assert fail.stmt == Assume(parse_atom("x == 4"))
    assert fail.target == errors[0].source


def test_statements_after_error_and_halt():
    program = parse_program("sym x\nif (x > 0) { halt }\nerror\n")
    halts = [t for t in program.system.transitions if isinstance(t.stmt, Halt)]
    assert len(halts) == 1
    assert len(program.targets) == 1


def test_crlf_and_separators():
    program = parse_program("var p = 0;;\r\np = p + 1; p = 2 * p\r\n")
    assert len(program.body) == 2


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("var p = 0\np = q + 1\n", UndeclaredVariable, 2),
        ("sym x\nx = 1\n", AssignToSymbolic, 2),
        ("sym x\nvar x = 0\n", DuplicateDeclaration, 2),
        ("var p = 0\nif (p > 0 { p = 1 }\n", ProgramSyntaxError, 2),
        ("var p = 0\np = 1\nvar q = 0\n", ProgramSyntaxError, 3),
        ("var p = 0\n}\n", ProgramSyntaxError, 2),
        ("var p = 0\nwhile (p < 1) { p = p + 1\n", ProgramSyntaxError, 3),
    ],
)
def test_rejected_programs(text, error, line):
    with pytest.raises(error) as raised:
        parse_program(text)
    if line is not None:
        assert raised.value.line == line


def test_non_linear_product():
    with pytest.raises(NonLinearExpression) as error:
        parse_program("sym x\nvar y = 0\ny = x * x\n")
    assert error.value.location == "line 3"
    with pytest.raises(NonLinearExpression):
        parse_program("sym x; y = x * x")


def test_constant_products_are_linear():
    program = parse_program("sym x\nvar y = 0\ny = 3 * (x - 1) * 2 + -x\n")
    assert program.body[0].expr == Expr.of({"x": 5}, -6)


def test_parse_formula():
    formula = parse_formula("x + y <= 3 && y > 0 && true")
    assert [str(a) for a in formula] == ["x + y <= 3", "y >= 1"]
    assert parse_formula("true").is_true
    with pytest.raises(ProgramSyntaxError):
        parse_atom("x <= 1 && y <= 1")
    with pytest.raises(ProgramSyntaxError):
        parse_formula("x <= 1 ||")


@pytest.mark.parametrize(
    "text",
    [
        gen_abduction_example(),
        gen_bitsum(4),
        gen_shortest_path(4, "four-node", 90),
        "sym x in [-3, 3]\nvar p = 1\nensure (p >= 1)\n"
        "while (!(p >= 8) && x != 0) { p = 2*p }\nassume (p <= 8 || x == 0)\nhalt\n",
    ],
)
def test_format_round_trip(text):
    program = parse_program(text)
    printed = format_program(program)
    reparsed = parse_program(printed)
    assert reparsed == program
    assert reparsed.system.transitions == program.system.transitions
    assert to_transition_system(reparsed).transitions == program.system.transitions
    assert format_program(reparsed) == printed


@given(st.integers(0, 2**32))
def test_random_programs_round_trip(seed):
    program = parse_program(random_program(random.Random(seed)))
    reparsed = parse_program(format_program(program))
    assert reparsed.system.transitions == program.system.transitions
    assert reparsed.system.loop_heads == program.system.loop_heads


def sample_programs() -> list:
    texts = [
        gen_shortest_path(4, "four-node", 90),
        gen_bitsum(3),
        gen_abduction_example(),
    ]
    texts += [random_program(random.Random(seed)) for seed in range(10)]
    return [parse_program(text) for text in texts]


@pytest.mark.parametrize("program", sample_programs())
def test_branches_are_total_and_disjoint(program):
    for point in program.system.branch_points:
        first, second = (t.stmt for t in program.system.outgoing(point))
        assert isinstance(first, Assume) and isinstance(second, Assume)
        assert not is_sat(Formula.of(first.atom, second.atom))
        names = sorted(first.atom.variables | second.atom.variables)
        for values in itertools.product(range(-4, 5), repeat=len(names)):
            model = dict(zip(names, values))
            assert first.atom.evaluate(model) != second.atom.evaluate(model)
