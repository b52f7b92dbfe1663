# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Symbolic Execution Engine Module.

Explores the symbolic execution tree of a program with a single
worklist. In ``dsei`` mode every completed subtree leaves an interpolant
in the subsumption table and states whose context entails a stored
interpolant at the same point are pruned. In ``vanilla`` mode the tree is
explored in full with no table and no propagation.
"""

import logging
import time
from collections.abc import Iterator
from dataclasses import asdict, dataclass, field, replace

from interpolse.concrete import HitError, HitHalt, execute_concrete
from interpolse.errors import (
    DepthBoundExceeded,
    DomainTooLarge,
    InterpolseError,
    PreconditionViolated,
    SettingsError,
    SolverBudgetExceeded,
    WitnessReplayError,
)
from interpolse.formula import TRUE, Expr, Formula, LinAtom, Relation
from interpolse.interp import (
    FALSE_MARKER,
    FalseMarker,
    Interpolant,
    PropagationInput,
    backprop,
)
from interpolse.lang import (
    Assign,
    Assume,
    Error,
    Halt,
    Program,
    ProgramPoint,
    Skip,
    Stmt,
    Transition,
)
from interpolse.search import STRATEGIES, Frontier
from interpolse.settings import Settings
from interpolse.solver import DEFAULT_ENUMERATE_CAP, Solver

logger = logging.getLogger(__name__)

MODES = ("dsei", "vanilla")


@dataclass(frozen=True)
class ExplorationConfig:
    """Options of one exploration.

    :param strategy: ``dfs`` or ``random``
    :param loop_bound: Iterations explored per run of a loop before
        truncation
    :param timeout: Wall-clock budget in seconds, ``None`` or 0 for none
    :param seed: Seed of the random strategy
    :param mode: ``dsei`` or ``vanilla``
    :param branch_depth: Branch-and-bound depth of the solver
    :param enumerate_cap: Largest input domain enumerated when the solver
        cannot produce a witness model
    :param record_trace: Keep a trace of visits, stores and propagations
    :param debug_assert: Re-check propagation contracts
    :param step_budget: Transition budget of witness replay
    :param strict_loop_bound: Raise instead of truncating at the loop bound
    """

    strategy: str = "dfs"
    loop_bound: int = 64
    timeout: float | None = 60.0
    seed: int = 0
    mode: str = "dsei"
    branch_depth: int = 64
    enumerate_cap: int = DEFAULT_ENUMERATE_CAP
    record_trace: bool = False
    debug_assert: bool = False
    step_budget: int = 100_000
    strict_loop_bound: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise SettingsError(f"unknown strategy {self.strategy!r}")
        if self.mode not in MODES:
            raise SettingsError(f"unknown mode {self.mode!r}")
        if self.loop_bound < 0:
            raise SettingsError("loop bound must not be negative")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "ExplorationConfig":
        values = {
            "strategy": settings.strategy,
            "loop_bound": settings.loop_bound,
            "timeout": settings.timeout,
            "seed": settings.seed,
            "branch_depth": settings.branch_depth,
            "enumerate_cap": settings.enumerate_cap,
            "debug_assert": settings.debug_assert,
            "step_budget": settings.step_budget,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class ExplorationStats:
    nodes_created: int = 0
    nodes_subsumed: int = 0
    infeasible_nodes: int = 0
    solver_calls: int = 0
    interpolants_stored: int = 0
    max_depth: int = 0
    leaves: int = 0
    loop_bound_hits: int = 0
    bounded: bool = False
    wall_time: float = 0.0

    def counters(self) -> dict[str, int | bool]:
        """Every field except wall time; equal for identical runs."""
        values = asdict(self)
        values.pop("wall_time")
        return values

    def as_dict(self) -> dict[str, int | float | bool]:
        return asdict(self)


@dataclass(frozen=True)
class SymbolicState:
    """Program point with its path condition and symbolic store.

    The path condition ranges over symbolic inputs only; the store maps
    every program variable to an expression over symbolic inputs.

    :param point: Current program point
    :param path_condition: Guards taken so far, in path order
    :param store: Program variable values in declaration order
    :param loop_counts: Arrivals at each loop head since the state last
        entered that loop; leaving a loop resets its count
    :param path: Indices of the transitions taken from the start
    """

    point: ProgramPoint
    path_condition: Formula
    store: tuple[tuple[str, Expr], ...]
    loop_counts: tuple[int, ...] = ()
    path: tuple[int, ...] = ()

    @property
    def store_map(self) -> dict[str, Expr]:
        return dict(self.store)

    def context(self) -> Formula:
        """Constraint store: path condition and ``p == store[p]`` per variable."""
        bindings = tuple(
            LinAtom.make(Expr.var(name), Relation.EQ, value)
            for name, value in self.store
        )
        return self.path_condition.conjoin(Formula(bindings))


def initial_state(program: Program) -> SymbolicState:
    """State at the start point with an empty path condition.

    :param program: Program to start
    :return: State holding the initial store; a loop head at the start
        counts as one arrival
    """
    return SymbolicState(
        point=program.system.start,
        path_condition=TRUE,
        store=tuple(program.initial_store.items()),
        loop_counts=tuple(
            1 if head == program.system.start else 0 for head in loop_heads(program)
        ),
    )


def loop_heads(program: Program) -> list[ProgramPoint]:
    """Loop heads in point order; indexes ``SymbolicState.loop_counts``."""
    return sorted(program.system.loop_heads, key=lambda p: p.id)


def step(
    program: Program, state: SymbolicState, transition: Transition
) -> tuple[SymbolicState, LinAtom | None]:
    """Symbolically execute one transition.

    :param program: Program the transition belongs to
    :param state: State at the transition source
    :param transition: Transition to take
    :return: Successor state and the guard it added (None if no guard
        was added); a guard equal to the false atom means the successor
        is infeasible
    """
    stmt = transition.stmt
    store = state.store_map
    path_condition = state.path_condition
    guard = None

    if isinstance(stmt, Assign):
        store[stmt.var] = stmt.expr.substitute_all(store)
    elif isinstance(stmt, Assume):
        evaluated = stmt.atom.substitute_all(store)
        if not evaluated.is_true:
            guard = evaluated
            path_condition = path_condition & evaluated
    elif not isinstance(stmt, Skip):
        raise InterpolseError(f"cannot step over '{stmt}'")

    heads = loop_heads(program)
    left = program.system.exits(transition)
    counts = tuple(
        0 if head in left else count for head, count in zip(heads, state.loop_counts)
    )
    if transition.target in heads:
        index = heads.index(transition.target)
        counts = counts[:index] + (counts[index] + 1,) + counts[index + 1 :]

    successor = SymbolicState(
        point=transition.target,
        path_condition=path_condition,
        store=tuple((name, store[name]) for name, _ in state.store),
        loop_counts=counts,
        path=state.path + (transition.index,),
    )
    return successor, guard


@dataclass(frozen=True)
class Intp:
    interpolant: Interpolant
    bounded: bool = False


@dataclass(frozen=True)
class ErrorFound:
    """An error point, or a halt violating ``violated``, was reached."""

    state: SymbolicState
    violated: LinAtom | None = None


DseiResult = Intp | FalseMarker | ErrorFound


@dataclass(frozen=True)
class Reachable:
    model: dict[str, int]
    path: tuple[int, ...]
    point: ProgramPoint
    violated: LinAtom | None = None


@dataclass(frozen=True)
class Unreachable:
    interpolant: Interpolant | None


@dataclass(frozen=True)
class Timeout:
    stats: ExplorationStats


Verdict = Reachable | Unreachable | Timeout


@dataclass(frozen=True)
class TableEntry:
    interpolant: Interpolant
    bounded: bool
    loop_counts: tuple[int, ...]

    def applies_to(self, state: SymbolicState) -> bool:
        """Unbounded entries apply anywhere; bounded ones need at least the same counts.

        Counts are per run of each loop, so a state with higher counts has
        no more iterations left before truncation than the stored one.
        """
        if not self.bounded:
            return True
        return all(c >= e for c, e in zip(state.loop_counts, self.loop_counts))


class SubsumptionTable:
    """Interpolants learned per program point, most recent first."""

    def __init__(self):
        """Class initialization method."""
        self.entries: dict[ProgramPoint, list[TableEntry]] = {}

    def __len__(self) -> int:
        return sum(len(entries) for entries in self.entries.values())

    def store(self, state: SymbolicState, interpolant: Interpolant, bounded: bool):
        entry = TableEntry(interpolant, bounded, state.loop_counts)
        self.entries.setdefault(state.point, []).insert(0, entry)

    def lookup(self, point: ProgramPoint) -> Iterator[TableEntry]:
        return iter(self.entries.get(point, ()))

    def at(self, point: ProgramPoint) -> list[Interpolant]:
        return [entry.interpolant for entry in self.entries.get(point, ())]


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    point: ProgramPoint
    formula: Formula | None = None
    stmt: Stmt | None = None
    path: tuple[int, ...] = ()

    def __str__(self) -> str:
        detail = f" {self.formula}" if self.formula is not None else ""
        via = f" via {self.stmt}" if self.stmt is not None else ""
        return f"{self.kind} {self.point}{via}:{detail}"


@dataclass(eq=False)
class Node:
    state: SymbolicState
    parent: "Node | None" = None
    stmt: Stmt | None = None
    slot: int = 0
    guard: LinAtom | None = None
    depth: int = 0
    pending: int = 0
    results: list = field(default_factory=list)
    bounded: bool = False
    expanded: bool = False
    _context: Formula | None = None

    @property
    def point(self) -> ProgramPoint:
        return self.state.point

    @property
    def context(self) -> Formula:
        if self._context is None:
            self._context = self.state.context()
        return self._context


@dataclass(frozen=True)
class _Done:
    result: Interpolant | FalseMarker
    bounded: bool = False


class Explorer:
    """Worklist exploration of one program.

    :param program: Program to explore
    :param config: Exploration options
    :param solver: Solver shared by every query of the run
    :param table: Subsumption table to read and extend
    """

    def __init__(
        self,
        program: Program,
        config: ExplorationConfig | None = None,
        solver: Solver | None = None,
        table: SubsumptionTable | None = None,
    ):
        """Class initialization method."""
        self.program = program
        self.config = config or ExplorationConfig()
        self.solver = solver or Solver(
            self.config.branch_depth, self.config.enumerate_cap
        )
        self.table = table if table is not None else SubsumptionTable()
        self.stats = ExplorationStats()
        self.trace: list[TraceEvent] = []
        self._heads = loop_heads(program)
        self._pruning = self.config.mode == "dsei"

    def _record(self, kind: str, node: Node, formula: Formula | None = None, stmt=None):
        if self.config.record_trace:
            self.trace.append(
                TraceEvent(kind, node.point, formula, stmt, node.state.path)
            )

    def verify(self) -> tuple[Verdict, ExplorationStats]:
        """Prove the error points unreachable or produce a replayed witness.

        :return: Verdict and statistics of the run
        """
        started = time.monotonic()
        outcome = self.explore(initial_state(self.program), started)

        if outcome is None:
            verdict: Verdict = Timeout(self.stats)
        elif isinstance(outcome, ErrorFound):
            try:
                verdict = self._witness(outcome)
            except SolverBudgetExceeded:
                logger.warning(
                    "no witness model for the error state at %s; inconclusive",
                    outcome.state.point,
                )
                verdict = Timeout(self.stats)
        elif isinstance(outcome, Intp):
            verdict = Unreachable(outcome.interpolant if self._pruning else None)
        else:
            verdict = Unreachable(None)

        self.stats.solver_calls = self.solver.calls
        self.stats.bounded = self.stats.loop_bound_hits > 0
        self.stats.wall_time = time.monotonic() - started
        logger.info(
            "%s %s: %s after %d nodes (%d subsumed)",
            self.config.mode,
            self.config.strategy,
            type(verdict).__name__.lower(),
            self.stats.nodes_created,
            self.stats.nodes_subsumed,
        )
        return verdict, self.stats

    def explore(
        self, root_state: SymbolicState, started: float | None = None
    ) -> DseiResult | None:
        """Explore the tree below a state.

        :param root_state: State to start from
        :param started: Monotonic start time for the timeout
        :return: Result of the root, or None on timeout
        """
        started = time.monotonic() if started is None else started
        timeout = self.config.timeout
        frontier = Frontier(self.config.strategy, self.config.seed)
        frontier.push(Node(root_state))
        self.stats.nodes_created += 1

        while frontier:
            if timeout and time.monotonic() - started > timeout:
                logger.warning("exploration timed out after %.1f s", timeout)
                return None
            node = frontier.pop()
            outcome = self._visit(node)
            if isinstance(outcome, ErrorFound):
                return outcome
            if isinstance(outcome, list):
                for child in reversed(outcome):
                    frontier.push(child)
                continue
            final = self._finish(node, outcome)
            if final is not None:
                return final

        raise InterpolseError("frontier emptied before the root completed")

    def _visit(self, node: Node) -> list[Node] | _Done | ErrorFound:
        state = node.state
        self.stats.max_depth = max(self.stats.max_depth, node.depth)
        self._record("visit", node)

        if node.guard is not None:
            try:
                feasible = self.solver.is_sat_with(
                    node.parent.state.path_condition, node.guard
                )
            except SolverBudgetExceeded:
                logger.debug("feasibility of %s inconclusive; kept", state.point)
                feasible = True
            if not feasible:
                self.stats.infeasible_nodes += 1
                self._record("infeasible", node, Formula((node.guard,)))
                return _Done(FALSE_MARKER)

        if self._pruning:
            for entry in self.table.lookup(state.point):
                if entry.applies_to(state) and self.solver.entails(
                    node.context, entry.interpolant.formula
                ):
                    self.stats.nodes_subsumed += 1
                    logger.debug("%s subsumed by %s", state.point, entry.interpolant)
                    self._record("subsume", node, entry.interpolant.formula)
                    return _Done(entry.interpolant, entry.bounded)

        outgoing = self.program.system.outgoing(state.point)
        if len(outgoing) == 1 and isinstance(outgoing[0].stmt, (Error, Halt)):
            self.stats.leaves += 1
            if isinstance(outgoing[0].stmt, Error):
                return ErrorFound(state)
            for atom in self.program.safety:
                if not self.solver.entails(node.context, Formula((atom,))):
                    return ErrorFound(state, atom)
            return _Done(Interpolant(self.program.safety))

        if not outgoing:
            raise InterpolseError(f"no transition leaves {state.point}")

        if state.point in self._heads:
            visits = state.loop_counts[self._heads.index(state.point)]
            if visits > self.config.loop_bound + 1:
                if self.config.strict_loop_bound:
                    raise DepthBoundExceeded(state.point)
                self.stats.leaves += 1
                self.stats.loop_bound_hits += 1
                logger.debug("loop bound reached at %s", state.point)
                return _Done(Interpolant(TRUE), bounded=True)

        children = []
        for slot, transition in enumerate(outgoing):
            successor, guard = step(self.program, state, transition)
            children.append(
                Node(
                    successor,
                    parent=node,
                    stmt=transition.stmt,
                    slot=slot,
                    guard=guard,
                    depth=node.depth + 1,
                )
            )
        node.pending = len(children)
        node.results = [None] * len(children)
        node.expanded = True
        self.stats.nodes_created += len(children)
        return children

    def _finish(self, node: Node, done: _Done) -> Intp | FalseMarker | None:
        """Propagate a completed node towards the root.

        :return: Root result once the root completes, else None
        """
        result, bounded = done.result, done.bounded
        while True:
            if node.expanded and self._pruning and isinstance(result, Interpolant):
                self.table.store(node.state, result, bounded)
                self.stats.interpolants_stored += 1
                logger.debug("stored at %s: %s", node.point, result)
                self._record("store", node, result.formula)

            parent = node.parent
            if parent is None:
                return result if result is FALSE_MARKER else Intp(result, bounded)

            if self._pruning:
                propagated = backprop(
                    PropagationInput(parent.context, node.stmt, result),
                    self.solver,
                    self.config.debug_assert,
                )
                self._record("propagate", parent, propagated.formula, node.stmt)
            else:
                propagated = Interpolant(TRUE)

            parent.results[node.slot] = propagated
            parent.bounded = parent.bounded or bounded
            parent.pending -= 1
            node.results = []
            if parent.pending:
                return None

            combined = Formula(()).conjoin(*(r.formula for r in parent.results))
            result = Interpolant(combined.tightened())
            if (
                self._pruning
                and self.config.debug_assert
                and not self.solver.entails(parent.context, result.formula)
            ):
                raise PreconditionViolated(
                    f"context at {parent.point} does not entail {result}"
                )
            bounded = parent.bounded
            node = parent

    def _model(self, formula: Formula) -> dict[str, int] | None:
        """Model of a path formula over the symbolic inputs.

        Falls back to enumerating the declared input domain when
        branch-and-bound gives up.

        :param formula: Formula over symbolic inputs
        :return: Model, or None when the formula is unsatisfiable
        :raises SolverBudgetExceeded: The solver gave up and the domain is
            unbounded or larger than the enumeration cap
        """
        try:
            sat = self.solver.is_sat(formula)
            return sat.model if sat else None
        except SolverBudgetExceeded as error:
            variables = self.program.symbolic_vars
            if any(v.low is None or v.high is None for v in variables):
                raise
            bounds = {v.name: (v.low, v.high) for v in variables}
            try:
                models = self.solver.enumerate_models(formula, bounds)
            except DomainTooLarge as too_large:
                logger.debug("%s", too_large)
                raise error from too_large
            logger.debug("witness model enumerated over %d inputs", len(bounds))
            return models[0] if models else None

    def _witness(self, found: ErrorFound) -> Reachable:
        """Extract a model for an error state and replay it concretely.

        :raises SolverBudgetExceeded: No model could be decided
        :raises WitnessReplayError: The model does not replay to the state
        """
        state = found.state
        store = state.store_map
        model = None
        if found.violated is None:
            model = self._model(state.path_condition)
        else:
            for alternative in found.violated.negate():
                model = self._model(
                    state.path_condition & alternative.substitute_all(store)
                )
                if model is not None:
                    break
        if model is None:
            raise WitnessReplayError(f"no model for the error state at {state.point}")

        inputs = {name: model.get(name, 0) for name in self.program.symbolic_names}
        outcome = execute_concrete(self.program, inputs, self.config.step_budget)

        if found.violated is None:
            replayed = (
                isinstance(outcome, HitError)
                and outcome.point == state.point
                and outcome.path == state.path
            )
        else:
            replayed = (
                isinstance(outcome, HitHalt)
                and outcome.path == state.path
                and not self.program.safety.evaluate({**inputs, **outcome.store})
            )
        if not replayed:
            raise WitnessReplayError(
                f"witness {inputs} does not replay to {state.point}: {outcome}"
            )
        logger.debug(
            "witness %s replayed along %d transitions", inputs, len(state.path)
        )
        return Reachable(inputs, state.path, state.point, found.violated)


def verify(
    program: Program, config: ExplorationConfig | None = None
) -> tuple[Verdict, ExplorationStats]:
    """Decide reachability of the program's error points.

    :param program: Program with at least one error point or safety atom
    :param config: Exploration options
    :return: Verdict and statistics
    """
    return Explorer(program, config).verify()


def run_vanilla(
    program: Program, config: ExplorationConfig | None = None
) -> tuple[Verdict, ExplorationStats]:
    """Explore every feasible path without subsumption.

    :param program: Program to explore
    :param config: Exploration options, forced to ``vanilla`` mode
    :return: Verdict and statistics
    """
    config = replace(config or ExplorationConfig(), mode="vanilla")
    return Explorer(program, config).verify()


def dsei(
    program: Program,
    state: SymbolicState | None = None,
    table: SubsumptionTable | None = None,
    config: ExplorationConfig | None = None,
) -> DseiResult | None:
    """Interpolating exploration of the subtree below one state.

    :param program: Program the state belongs to
    :param state: Root of the subtree, the initial state by default
    :param table: Table to consult and extend
    :param config: Exploration options, forced to ``dsei`` mode
    :return: Tree interpolant, FALSE_MARKER, ErrorFound, or None on timeout
    """
    config = replace(config or ExplorationConfig(), mode="dsei")
    explorer = Explorer(program, config, table=table)
    state = state or initial_state(program)
    try:
        if not explorer.solver.is_sat(state.path_condition):
            return FALSE_MARKER
    except SolverBudgetExceeded:
        logger.debug("feasibility of the root state inconclusive; exploring")
    return explorer.explore(state)
