# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Program Language Module.

Parses the small imperative language, lowers it into a transition
system and pretty-prints it back to source.

A program is a list of declarations followed by statements::

    sym x in [0, 255]      // symbolic input, optionally bounded
    var y = 0              // program variable with its initial value
    ensure (y >= 0)        // safety property checked at halt
    if (x > 0 && x != 3) { y = 2*x + 1 } else { error }
    while (y < 10) { y = y + 1 }
    assert (y >= 10)

Statements are separated by newlines or ``;``. Conditions may combine
atoms with ``!``, ``&&``, ``||`` and parentheses; lowering turns them
into chains of single-atom branches.
"""

import logging
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

from interpolse.errors import (
    AssignToSymbolic,
    DuplicateDeclaration,
    NonLinearExpression,
    ProgramSyntaxError,
    UndeclaredVariable,
)
from interpolse.formula import (
    FALSE_ATOM,
    TRUE_ATOM,
    Expr,
    Formula,
    LinAtom,
    Relation,
)

logger = logging.getLogger(__name__)

KEYWORDS = frozenset(
    {
        "sym",
        "var",
        "in",
        "ensure",
        "if",
        "else",
        "while",
        "assume",
        "assert",
        "error",
        "halt",
        "true",
        "false",
    }
)
RELATIONS = {"==", "!=", "<", "<=", ">", ">="}

_TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r\f]+)
    |(?P<newline>\n)
    |(?P<comment>//[^\n]*)
    |(?P<int>\d+)
    |(?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>==|!=|<=|>=|&&|\|\||[-+*<>=!(){}\[\],;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int


def tokenize(text: str) -> list[Token]:
    """Split program text into tokens.

    :param text: Program source, LF or CRLF line endings
    :return: Tokens followed by an ``eof`` token
    """
    tokens: list[Token] = []
    line = 1
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if not match:
            raise ProgramSyntaxError(line, f"unexpected character {text[position]!r}")
        kind = match.lastgroup
        value = match.group()
        if kind == "newline":
            line += 1
        elif kind == "int":
            tokens.append(Token("int", value, line))
        elif kind == "ident":
            tokens.append(Token("kw" if value in KEYWORDS else "ident", value, line))
        elif kind == "op":
            tokens.append(Token("op", value, line))
        position = match.end()
    tokens.append(Token("eof", "", line))
    return tokens


# Conditions


class Cond:
    pass


@dataclass(frozen=True)
class CondAtom(Cond):
    atom: LinAtom

    def __str__(self) -> str:
        return str(self.atom)


@dataclass(frozen=True)
class CondNot(Cond):
    item: Cond

    def __str__(self) -> str:
        return f"!({self.item})"


@dataclass(frozen=True)
class CondAnd(Cond):
    left: Cond
    right: Cond

    def __str__(self) -> str:
        return f"({self.left} && {self.right})"


@dataclass(frozen=True)
class CondOr(Cond):
    left: Cond
    right: Cond

    def __str__(self) -> str:
        return f"({self.left} || {self.right})"


# Source statements


@dataclass(frozen=True)
class SymbolicVar:
    name: str
    low: int | None = None
    high: int | None = None


@dataclass(frozen=True)
class ProgramVar:
    name: str
    initial: int = 0


@dataclass(frozen=True)
class AssignStmt:
    name: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AssumeStmt:
    cond: Cond
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AssertStmt:
    cond: Cond
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class IfStmt:
    cond: Cond
    then: tuple
    orelse: tuple | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class WhileStmt:
    cond: Cond
    body: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ErrorStmt:
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class HaltStmt:
    line: int = field(default=0, compare=False)


# Transition system


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr

    def __str__(self) -> str:
        return f"{self.var} = {self.expr}"


@dataclass(frozen=True)
class Assume:
    atom: LinAtom

    def __str__(self) -> str:
        return f"assume({self.atom})"


@dataclass(frozen=True)
class Error:
    def __str__(self) -> str:
        return "error"


@dataclass(frozen=True)
class Halt:
    def __str__(self) -> str:
        return "halt"


@dataclass(frozen=True)
class Skip:
    def __str__(self) -> str:
        return "skip"


Stmt = Assign | Assume | Error | Halt | Skip


@dataclass(frozen=True)
class ProgramPoint:
    """Location in the transition system.

    Identity is the id alone; every loop iteration reaches the same point.
    """

    id: int
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"L{self.id}"


@dataclass(frozen=True)
class Transition:
    index: int
    source: ProgramPoint
    target: ProgramPoint
    stmt: Stmt

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}: {self.stmt}"


@dataclass(frozen=True)
class TransitionSystem:
    points: tuple[ProgramPoint, ...]
    start: ProgramPoint
    transitions: tuple[Transition, ...]
    loop_heads: frozenset[ProgramPoint] = frozenset()
    _outgoing: dict = field(default_factory=dict, compare=False, repr=False)
    _bodies: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        index: dict[ProgramPoint, list[Transition]] = {p: [] for p in self.points}
        for transition in self.transitions:
            index[transition.source].append(transition)
        self._outgoing.update({p: tuple(ts) for p, ts in index.items()})

    def outgoing(self, point: ProgramPoint) -> tuple[Transition, ...]:
        return self._outgoing.get(point, ())

    def _reachable(self, start: ProgramPoint, forward: bool) -> set[ProgramPoint]:
        edges: dict[ProgramPoint, list[ProgramPoint]] = {}
        for t in self.transitions:
            source, target = (t.source, t.target) if forward else (t.target, t.source)
            edges.setdefault(source, []).append(target)
        seen, stack = {start}, [start]
        while stack:
            for successor in edges.get(stack.pop(), ()):
                if successor not in seen:
                    seen.add(successor)
                    stack.append(successor)
        return seen

    def loop_body(self, head: ProgramPoint) -> frozenset[ProgramPoint]:
        """Points on some cycle through a loop head, the head included.

        The body of an enclosing loop contains the bodies of the loops
        nested in it.

        :param head: One of :attr:`loop_heads`
        :return: Points that can both be reached from and reach ``head``
        """
        if head not in self._bodies:
            body = self._reachable(head, True) & self._reachable(head, False)
            self._bodies[head] = frozenset(body)
        return self._bodies[head]

    def exits(self, transition: Transition) -> frozenset[ProgramPoint]:
        """Loop heads whose body ``transition`` leaves."""
        return frozenset(
            head
            for head in self.loop_heads
            if transition.source in self.loop_body(head)
            and transition.target not in self.loop_body(head)
        )

    @property
    def branch_points(self) -> tuple[ProgramPoint, ...]:
        return tuple(p for p in self.points if len(self.outgoing(p)) == 2)

    @property
    def error_points(self) -> frozenset[ProgramPoint]:
        return frozenset(
            t.source for t in self.transitions if isinstance(t.stmt, Error)
        )

    def __str__(self) -> str:
        return "\n".join(str(t) for t in self.transitions)


@dataclass(frozen=True)
class Program:
    symbolic_vars: tuple[SymbolicVar, ...]
    program_vars: tuple[ProgramVar, ...]
    body: tuple
    safety: Formula
    system: TransitionSystem = field(compare=False, repr=False)

    @property
    def targets(self) -> frozenset[ProgramPoint]:
        return self.system.error_points

    @property
    def symbolic_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.symbolic_vars)

    @property
    def program_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.program_vars)

    @property
    def initial_store(self) -> dict[str, Expr]:
        return {v.name: Expr.constant(v.initial) for v in self.program_vars}


# Parsing


class Parser:
    """Recursive-descent parser.

    :param text: Program source
    :param check_declarations: Reject identifiers that were not declared
    """

    def __init__(self, text: str, check_declarations: bool = True):
        """Class initialization method."""
        self.tokens = tokenize(text)
        self.position = 0
        self.check_declarations = check_declarations
        self.symbolic: dict[str, SymbolicVar] = {}
        self.program: dict[str, ProgramVar] = {}
        self.safety: list[LinAtom] = []

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.position + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "eof":
            self.position += 1
        return token

    def at(self, text: str) -> bool:
        return self.current.kind in ("op", "kw") and self.current.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.current.text or "end of input"
            raise ProgramSyntaxError(self.current.line, f"expected '{text}', found '{found}'")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.current.kind != "ident":
            found = self.current.text or "end of input"
            raise ProgramSyntaxError(self.current.line, f"expected identifier, found '{found}'")
        return self.advance()

    def skip_separators(self):
        while self.at(";"):
            self.advance()

    def signed_int(self) -> int:
        negative = False
        if self.at("-"):
            self.advance()
            negative = True
        if self.current.kind != "int":
            raise ProgramSyntaxError(self.current.line, "expected integer")
        value = int(self.advance().text)
        return -value if negative else value

    def parse_program(self) -> Program:
        self.skip_separators()
        while self.at("sym") or self.at("var") or self.at("ensure"):
            self.declaration()
            self.skip_separators()

        body = self.block_items(top_level=True)
        if self.current.kind != "eof":
            raise ProgramSyntaxError(self.current.line, f"unexpected '{self.current.text}'")

        symbolic_vars = tuple(self.symbolic.values())
        program_vars = tuple(self.program.values())
        safety = Formula(tuple(self.safety))
        system = lower_program(symbolic_vars, body)
        return Program(symbolic_vars, program_vars, body, safety, system)

    def declaration(self):
        token = self.advance()
        if token.text == "ensure":
            self.expect("(")
            self.safety.append(self.atom())
            self.expect(")")
            return

        name = self.expect_ident().text
        if name in self.symbolic or name in self.program:
            raise DuplicateDeclaration(name, token.line)

        if token.text == "sym":
            low = high = None
            if self.at("in"):
                self.advance()
                self.expect("[")
                low = self.signed_int()
                self.expect(",")
                high = self.signed_int()
                self.expect("]")
            self.symbolic[name] = SymbolicVar(name, low, high)
        else:
            self.expect("=")
            self.program[name] = ProgramVar(name, self.signed_int())

    def block_items(self, top_level: bool = False) -> tuple:
        items = []
        self.skip_separators()
        while not (self.current.kind == "eof" or self.at("}")):
            if self.at("sym") or self.at("var") or self.at("ensure"):
                raise ProgramSyntaxError(
                    self.current.line, "declarations must precede statements"
                )
            items.append(self.statement())
            self.skip_separators()
        if top_level and self.at("}"):
            raise ProgramSyntaxError(self.current.line, "unmatched '}'")
        return tuple(items)

    def block(self) -> tuple:
        self.expect("{")
        items = self.block_items()
        self.expect("}")
        return items

    def statement(self):
        token = self.current
        if token.kind == "ident":
            return self.assignment()
        if token.kind != "kw":
            raise ProgramSyntaxError(token.line, f"unexpected '{token.text or 'end of input'}'")

        keyword = self.advance().text
        if keyword in ("assume", "assert"):
            self.expect("(")
            cond = self.condition()
            self.expect(")")
            stmt_class = AssumeStmt if keyword == "assume" else AssertStmt
            return stmt_class(cond, token.line)
        if keyword == "if":
            self.expect("(")
            cond = self.condition()
            self.expect(")")
            then = self.block()
            orelse = None
            if self.at("else"):
                self.advance()
                if self.at("if"):
                    orelse = (self.statement(),)
                else:
                    orelse = self.block()
            return IfStmt(cond, then, orelse, token.line)
        if keyword == "while":
            self.expect("(")
            cond = self.condition()
            self.expect(")")
            return WhileStmt(cond, self.block(), token.line)
        if keyword == "error":
            return ErrorStmt(token.line)
        if keyword == "halt":
            return HaltStmt(token.line)
        raise ProgramSyntaxError(token.line, f"unexpected '{keyword}'")

    def assignment(self) -> AssignStmt:
        token = self.expect_ident()
        name = token.text
        self.expect("=")
        expr = self.linexpr()
        if name in self.symbolic:
            raise AssignToSymbolic(name, token.line)
        if self.check_declarations and name not in self.program:
            raise UndeclaredVariable(name, token.line)
        return AssignStmt(name, expr, token.line)

    def condition(self) -> Cond:
        left = self.conjunction()
        while self.at("||"):
            self.advance()
            left = CondOr(left, self.conjunction())
        return left

    def conjunction(self) -> Cond:
        left = self.negation()
        while self.at("&&"):
            self.advance()
            left = CondAnd(left, self.negation())
        return left

    def negation(self) -> Cond:
        if self.at("!"):
            self.advance()
            return CondNot(self.negation())
        if self.at("("):
            saved = self.position
            self.advance()
            try:
                inner = self.condition()
                self.expect(")")
                if not (self.current.kind == "op" and self.current.text in RELATIONS):
                    if not (self.at("+") or self.at("-") or self.at("*")):
                        return inner
            except ProgramSyntaxError:
                pass
            self.position = saved
        return CondAtom(self.atom())

    def atom(self) -> LinAtom:
        if self.at("true") or self.at("false"):
            return TRUE_ATOM if self.advance().text == "true" else FALSE_ATOM
        lhs = self.linexpr()
        token = self.current
        if not (token.kind == "op" and token.text in RELATIONS):
            raise ProgramSyntaxError(token.line, "expected a relation")
        self.advance()
        rhs = self.linexpr()
        return LinAtom.make(lhs, Relation(token.text), rhs)

    def linexpr(self) -> Expr:
        result = self.term()
        while self.at("+") or self.at("-"):
            sign = self.advance().text
            term = self.term()
            result = result + term if sign == "+" else result - term
        return result

    def term(self) -> Expr:
        line = self.current.line
        if self.at("-"):
            self.advance()
            return -self.term()
        result = self.factor()
        while self.at("*"):
            self.advance()
            other = self.factor()
            if result.is_constant:
                result = other.scale(result.const)
            elif other.is_constant:
                result = result.scale(other.const)
            else:
                raise NonLinearExpression(f"line {line}")
        return result

    def factor(self) -> Expr:
        token = self.current
        if token.kind == "int":
            self.advance()
            return Expr.constant(int(token.text))
        if token.kind == "ident":
            self.advance()
            if self.check_declarations and not (
                token.text in self.symbolic or token.text in self.program
            ):
                raise UndeclaredVariable(token.text, token.line)
            return Expr.var(token.text)
        if self.at("("):
            self.advance()
            inner = self.linexpr()
            self.expect(")")
            return inner
        if self.at("-"):
            return self.term()
        raise ProgramSyntaxError(token.line, f"unexpected '{token.text or 'end of input'}'")


def parse_program(text: str) -> Program:
    """Parse program text into a Program with its transition system.

    :param text: Program source
    :return: Parsed and lowered program
    """
    program = Parser(text).parse_program()
    logger.debug(
        "parsed program: %d points, %d transitions",
        len(program.system.points),
        len(program.system.transitions),
    )
    return program


def parse_formula(text: str) -> Formula:
    """Parse a conjunction of atoms joined by ``&&`` into a Formula.

    Identifiers need no declaration. ``true`` is the empty conjunction.

    :param text: Formula text
    :return: Canonical formula
    """
    parser = Parser(text, check_declarations=False)
    atoms = [parser.atom()]
    while parser.at("&&"):
        parser.advance()
        atoms.append(parser.atom())
    if parser.current.kind != "eof":
        raise ProgramSyntaxError(parser.current.line, f"unexpected '{parser.current.text}'")
    return Formula(tuple(atoms))


def parse_atom(text: str) -> LinAtom:
    formula = parse_formula(text)
    if len(formula) != 1:
        raise ProgramSyntaxError(1, "expected a single atom")
    return formula.atoms[0]


# Lowering


class _Lowering:
    """Backward construction of the transition graph.

    Each statement is lowered against the point its successor starts at,
    so conditions and branches share continuation points instead of
    duplicating code.
    """

    def __init__(self):
        """Class initialization method."""
        self.lines: list[int] = []
        self.edges: list[tuple[int, int, Stmt]] = []
        self.loop_heads: set[int] = set()

    def point(self, line: int) -> int:
        self.lines.append(line)
        return len(self.lines) - 1

    def edge(self, source: int, target: int, stmt: Stmt):
        self.edges.append((source, target, stmt))

    def terminal(self, stmt: Error | Halt, line: int) -> int:
        entry = self.point(line)
        self.edge(entry, self.point(line), stmt)
        return entry

    def cond(
        self,
        cond: Cond,
        on_true: int | None,
        on_false: int | None,
        line: int,
        at: int | None = None,
    ) -> int:
        if isinstance(cond, CondAtom):
            entry = self.point(line) if at is None else at
            if on_true is not None:
                self.edge(entry, on_true, Assume(cond.atom))
            if on_false is not None:
                self.edge(entry, on_false, Assume(cond.atom.complement()))
            return entry
        if isinstance(cond, CondNot):
            return self.cond(cond.item, on_false, on_true, line, at)
        if isinstance(cond, CondAnd):
            right = self.cond(cond.right, on_true, on_false, line)
            return self.cond(cond.left, right, on_false, line, at)
        right = self.cond(cond.right, on_true, on_false, line)
        return self.cond(cond.left, on_true, right, line, at)

    def block(self, stmts: Sequence, follow: int) -> int:
        for stmt in reversed(stmts):
            follow = self.stmt(stmt, follow)
        return follow

    def stmt(self, stmt, follow: int) -> int:
        if isinstance(stmt, AssignStmt):
            entry = self.point(stmt.line)
            self.edge(entry, follow, Assign(stmt.name, stmt.expr))
            return entry
        if isinstance(stmt, AssumeStmt):
            return self.cond(stmt.cond, follow, None, stmt.line)
        if isinstance(stmt, AssertStmt):
            failure = self.terminal(Error(), stmt.line)
            return self.cond(CondNot(stmt.cond), failure, follow, stmt.line)
        if isinstance(stmt, IfStmt):
            then_entry = self.block(stmt.then, follow)
            else_entry = self.block(stmt.orelse, follow) if stmt.orelse else follow
            return self.cond(stmt.cond, then_entry, else_entry, stmt.line)
        if isinstance(stmt, WhileStmt):
            head = self.point(stmt.line)
            self.loop_heads.add(head)
            body_entry = self.block(stmt.body, head)
            self.cond(stmt.cond, body_entry, follow, stmt.line, at=head)
            return head
        if isinstance(stmt, ErrorStmt):
            return self.terminal(Error(), stmt.line)
        if isinstance(stmt, HaltStmt):
            return self.terminal(Halt(), stmt.line)
        raise TypeError(f"unknown statement {stmt!r}")

    def finish(self, start: int) -> TransitionSystem:
        """Renumber reachable points depth first, first transition first."""
        outgoing: dict[int, list[tuple[int, int, Stmt]]] = {}
        for edge in self.edges:
            outgoing.setdefault(edge[0], []).append(edge)

        numbering: dict[int, int] = {}
        order: list[tuple[int, int, Stmt]] = []
        stack = [start]
        while stack:
            raw = stack.pop()
            if raw in numbering:
                continue
            numbering[raw] = len(numbering) + 1
            edges = outgoing.get(raw, [])
            order.extend(edges)
            for _, target, _ in reversed(edges):
                if target not in numbering:
                    stack.append(target)

        points = {
            raw: ProgramPoint(number, self.lines[raw])
            for raw, number in numbering.items()
        }
        transitions = tuple(
            Transition(index, points[source], points[target], stmt)
            for index, (source, target, stmt) in enumerate(
                sorted(order, key=lambda e: numbering[e[0]])
            )
        )
        return TransitionSystem(
            points=tuple(sorted(points.values(), key=lambda p: p.id)),
            start=points[start],
            transitions=transitions,
            loop_heads=frozenset(points[h] for h in self.loop_heads if h in points),
        )


def lower_program(
    symbolic_vars: Sequence[SymbolicVar], body: Sequence
) -> TransitionSystem:
    """Lower declarations and statements into a transition system.

    Declared bounds of symbolic inputs become leading one-way assumes and
    falling off the end of the program halts.

    :param symbolic_vars: Symbolic inputs in declaration order
    :param body: Source statements
    :return: Transition system
    """
    lowering = _Lowering()
    last_line = max((getattr(s, "line", 0) for s in body), default=0)
    follow = lowering.block(body, lowering.terminal(Halt(), last_line))
    for var in reversed(symbolic_vars):
        if var.high is not None:
            atom = LinAtom.relation(Expr.var(var.name), Relation.LE, var.high)
            follow = lowering.cond(CondAtom(atom), follow, None, 0)
        if var.low is not None:
            atom = LinAtom.relation(Expr.var(var.name), Relation.GE, var.low)
            follow = lowering.cond(CondAtom(atom), follow, None, 0)
    return lowering.finish(follow)


def to_transition_system(program: Program) -> TransitionSystem:
    return lower_program(program.symbolic_vars, program.body)


# Printing


def _format_block(stmts: Sequence, indent: int) -> Iterator[str]:
    pad = "    " * indent
    for stmt in stmts:
        if isinstance(stmt, AssignStmt):
            yield f"{pad}{stmt.name} = {stmt.expr}"
        elif isinstance(stmt, AssumeStmt):
            yield f"{pad}assume ({stmt.cond})"
        elif isinstance(stmt, AssertStmt):
            yield f"{pad}assert ({stmt.cond})"
        elif isinstance(stmt, ErrorStmt):
            yield f"{pad}error"
        elif isinstance(stmt, HaltStmt):
            yield f"{pad}halt"
        elif isinstance(stmt, WhileStmt):
            yield f"{pad}while ({stmt.cond}) {{"
            yield from _format_block(stmt.body, indent + 1)
            yield f"{pad}}}"
        elif isinstance(stmt, IfStmt):
            yield f"{pad}if ({stmt.cond}) {{"
            yield from _format_block(stmt.then, indent + 1)
            if stmt.orelse is None:
                yield f"{pad}}}"
            else:
                yield f"{pad}}} else {{"
                yield from _format_block(stmt.orelse, indent + 1)
                yield f"{pad}}}"


def format_program(program: Program) -> str:
    """Pretty-print a program in canonical form.

    :param program: Parsed program
    :return: Source text that parses back to the same transition system
    """
    lines = []
    for var in program.symbolic_vars:
        if var.low is None:
            lines.append(f"sym {var.name}")
        else:
            lines.append(f"sym {var.name} in [{var.low}, {var.high}]")
    for var in program.program_vars:
        lines.append(f"var {var.name} = {var.initial}")
    for atom in program.safety:
        lines.append(f"ensure ({atom})")
    lines.extend(_format_block(program.body, 0))
    return "\n".join(lines) + "\n"
