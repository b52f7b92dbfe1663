# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Command Line Interface Module."""

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any

from interpolse import __version__
from interpolse.benchmarks import gen_abduction_example, gen_bitsum, gen_shortest_path
from interpolse.concrete import Blocked, BudgetExhausted, HitError, HitHalt, execute_concrete
from interpolse.engine import (
    ExplorationConfig,
    ExplorationStats,
    Explorer,
    Reachable,
    Timeout,
    Unreachable,
    Verdict,
)
from interpolse.errors import InterpolseError
from interpolse.lang import Program, parse_program
from interpolse.records import RunRecord
from interpolse.settings import Settings, load_settings

logger = logging.getLogger(__name__)

EXIT_UNREACHABLE = 0
EXIT_REACHABLE = 1
EXIT_TIMEOUT = 2
EXIT_ERROR = 3

_BOUND_RE = re.compile(r"\bBOUND\b")


def exit_code(verdict: Verdict) -> int:
    """Process exit code for a verdict.

    :param verdict: Outcome of an exploration
    :return: EXIT_UNREACHABLE, EXIT_REACHABLE or EXIT_TIMEOUT
    """
    if isinstance(verdict, Unreachable):
        return EXIT_UNREACHABLE
    if isinstance(verdict, Reachable):
        return EXIT_REACHABLE
    return EXIT_TIMEOUT


def setup_logging(quiet: bool = False, verbose: bool = False):
    """Configure root logging to standard error.

    :param quiet: Only log errors
    :param verbose: Log informational messages as well
    """
    level = logging.ERROR if quiet else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _add_exploration_flags(parser: argparse.ArgumentParser, with_mode: bool = True):
    parser.add_argument("program", type=str, help="Program file")
    if with_mode:
        parser.add_argument("--mode", choices=("dsei", "vanilla"), default="dsei")
    parser.add_argument("--strategy", choices=("dfs", "random"), default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--loop-bound", type=int, default=None, dest="loop_bound")
    parser.add_argument(
        "--timeout", type=float, default=None, help="Seconds, 0 for no limit"
    )
    parser.add_argument(
        "--stats-out", type=str, default=None, dest="stats_out", help="JSON record file"
    )
    parser.add_argument(
        "--bound", type=int, default=None, help="Value substituted for BOUND"
    )


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with EXIT_ERROR."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse arguments that are passed in when the program was run.

    Shared flags (``--quiet``, ``--verbose``, ``--config``) follow the
    last subcommand.
    """
    common = ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="Only report errors")
    common.add_argument("--verbose", action="store_true", help="Log progress")
    common.add_argument("--config", type=str, default=None, help="Settings file")

    parser = ArgumentParser(
        description="Prove error locations of small programs reachable or unreachable."
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    verify_parser = commands.add_parser(
        "verify", parents=[common], help="Explore a program"
    )
    _add_exploration_flags(verify_parser)

    compare_parser = commands.add_parser(
        "compare", parents=[common], help="Explore with and without interpolation"
    )
    _add_exploration_flags(compare_parser, with_mode=False)

    run_parser = commands.add_parser(
        "run", parents=[common], help="Execute a program on concrete inputs"
    )
    run_parser.add_argument("program", type=str, help="Program file")
    run_parser.add_argument(
        "--input",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="Value of a symbolic input (repeatable)",
    )
    run_parser.add_argument("--bound", type=int, default=None)
    run_parser.add_argument("--step-budget", type=int, default=None, dest="step_budget")

    generate_parser = commands.add_parser("generate", help="Write a benchmark program")
    families = generate_parser.add_subparsers(dest="family", required=True)
    shortest = families.add_parser("shortest-path", parents=[common])
    shortest.add_argument("--nodes", type=int, default=4)
    shortest.add_argument(
        "--matrix",
        type=str,
        default="four-node",
        help="four-node, layered-random(SEED) or a JSON file with a weight matrix",
    )
    shortest.add_argument(
        "--bound", type=int, default=None, help="Threshold, BOUND placeholder if absent"
    )
    bitsum = families.add_parser("bitsum", parents=[common])
    bitsum.add_argument("--bits", type=int, default=8)
    example = families.add_parser("abduction-example", parents=[common])
    for family in (shortest, bitsum, example):
        family.add_argument("-o", "--output", type=str, default=None)

    return parser.parse_args(argv)


def load_program(path: str, bound: int | None = None) -> Program:
    """Read and parse a program file, substituting BOUND when given.

    :param path: Program file
    :param bound: Value for the ``BOUND`` placeholder
    :return: Parsed program
    """
    text = Path(path).read_text(encoding="utf-8")
    if bound is not None:
        text = _BOUND_RE.sub(str(bound), text)
    return parse_program(text)


def build_config(
    arguments: argparse.Namespace, settings: Settings, mode: str = "dsei"
) -> ExplorationConfig:
    """Exploration options from settings overridden by command line flags.

    :param arguments: Parsed command line arguments
    :param settings: Loaded application settings
    :param mode: ``dsei`` or ``vanilla``
    :return: Exploration configuration
    """
    return ExplorationConfig.from_settings(
        settings,
        mode=mode,
        strategy=arguments.strategy,
        seed=arguments.seed,
        loop_bound=arguments.loop_bound,
        timeout=arguments.timeout,
    )


def format_verdict(verdict: Verdict, stats: ExplorationStats) -> list[str]:
    """Human-readable report of one run.

    :param verdict: Outcome of the run
    :param stats: Statistics of the run
    :return: Report lines, verdict first and node counts last
    """
    lines = []
    if isinstance(verdict, Unreachable):
        lines.append("UNREACHABLE")
        if verdict.interpolant is not None:
            lines.append(f"root interpolant: {verdict.interpolant}")
    elif isinstance(verdict, Reachable):
        lines.append("REACHABLE")
        witness = ", ".join(f"{k}={v}" for k, v in verdict.model.items())
        lines.append(f"witness: {witness or '(no inputs)'}")
        if verdict.violated is not None:
            lines.append(f"violates: {verdict.violated}")
        lines.append(
            f"replayed along {len(verdict.path)} transitions to {verdict.point}"
        )
    else:
        lines.append("TIMEOUT")
    bounded = " (loop bound reached)" if stats.bounded else ""
    lines.append(
        f"nodes: {stats.nodes_created} created, {stats.nodes_subsumed} subsumed, "
        f"{stats.infeasible_nodes} infeasible, {stats.leaves} leaves; "
        f"solver calls: {stats.solver_calls}; {stats.wall_time:.3f} s{bounded}"
    )
    return lines


def cmd_verify(arguments: argparse.Namespace, settings: Settings) -> int:
    """Run one exploration and report its verdict.

    :param arguments: Parsed command line arguments
    :param settings: Loaded application settings
    :return: Exit code of the verdict
    """
    program = load_program(arguments.program, arguments.bound)
    config = build_config(arguments, settings, arguments.mode)
    verdict, stats = Explorer(program, config).verify()

    if not arguments.quiet:
        print("\n".join(format_verdict(verdict, stats)))
    if arguments.stats_out:
        RunRecord.from_run(arguments.program, config, verdict, stats).dump(
            arguments.stats_out
        )
    return exit_code(verdict)


def cmd_compare(arguments: argparse.Namespace, settings: Settings) -> int:
    """Run DSEI and vanilla on one program and report both.

    :param arguments: Parsed command line arguments
    :param settings: Loaded application settings
    :return: Exit code of the DSEI verdict, EXIT_ERROR if decided verdicts
        disagree
    """
    program = load_program(arguments.program, arguments.bound)
    records: dict[str, Any] = {}
    results = {}
    for mode in ("dsei", "vanilla"):
        config = build_config(arguments, settings, mode)
        verdict, stats = Explorer(program, config).verify()
        results[mode] = verdict, stats
        records[mode] = RunRecord.from_run(arguments.program, config, verdict, stats)

    (dsei_verdict, dsei_stats), (vanilla_verdict, vanilla_stats) = (
        results["dsei"],
        results["vanilla"],
    )
    node_ratio = vanilla_stats.nodes_created / max(dsei_stats.nodes_created, 1)
    speedup = vanilla_stats.wall_time / max(dsei_stats.wall_time, 1e-9)

    if not arguments.quiet:
        for mode in ("dsei", "vanilla"):
            print(f"[{mode}]")
            print("\n".join(format_verdict(*results[mode])))
        print(f"node ratio (vanilla/dsei): {node_ratio:.2f}")
        print(f"speedup (vanilla/dsei): {speedup:.2f}")

    if arguments.stats_out:
        report = {
            "dsei": records["dsei"].to_dict(),
            "vanilla": records["vanilla"].to_dict(),
            "node_ratio": node_ratio,
            "speedup": speedup,
        }
        Path(arguments.stats_out).write_text(
            json.dumps(report, indent=2) + "\n", encoding="utf-8"
        )

    decided = (Reachable, Unreachable)
    if (
        isinstance(dsei_verdict, decided)
        and isinstance(vanilla_verdict, decided)
        and type(dsei_verdict) is not type(vanilla_verdict)
    ):
        logger.error("dsei and vanilla verdicts disagree")
        return EXIT_ERROR
    return exit_code(dsei_verdict)


def _parse_inputs(pairs: list[str]) -> dict[str, int]:
    inputs = {}
    for pair in pairs:
        name, separator, value = pair.partition("=")
        if not separator:
            raise InterpolseError(f"expected NAME=VALUE, got {pair!r}")
        try:
            inputs[name.strip()] = int(value)
        except ValueError as error:
            raise InterpolseError(f"input {name!r} is not an integer") from error
    return inputs


def cmd_run(arguments: argparse.Namespace, settings: Settings) -> int:
    """Execute a program on concrete inputs.

    :param arguments: Parsed command line arguments
    :param settings: Loaded application settings
    :return: EXIT_REACHABLE on an error or a violated safety property,
        EXIT_TIMEOUT when the step budget runs out, else EXIT_UNREACHABLE
    """
    program = load_program(arguments.program, arguments.bound)
    inputs = _parse_inputs(arguments.input)
    budget = arguments.step_budget or settings.step_budget
    outcome = execute_concrete(program, inputs, budget)

    if isinstance(outcome, HitError):
        message, code = f"error at {outcome.point}", EXIT_REACHABLE
    elif isinstance(outcome, HitHalt):
        safe = program.safety.evaluate({**inputs, **outcome.store})
        message = "halt" if safe else "halt violating the safety property"
        code = EXIT_UNREACHABLE if safe else EXIT_REACHABLE
    elif isinstance(outcome, Blocked):
        message, code = f"blocked at {outcome.point}", EXIT_UNREACHABLE
    elif isinstance(outcome, BudgetExhausted):
        message, code = f"step budget exhausted at {outcome.point}", EXIT_TIMEOUT

    if not arguments.quiet:
        print(message)
        store = getattr(outcome, "store", None)
        if store:
            print(", ".join(f"{k}={v}" for k, v in store.items()))
    return code


def _read_matrix(value: str) -> Any:
    path = Path(value)
    if path.suffix == ".json" and path.exists():
        with path.open(mode="r", encoding="utf-8") as matrix_file:
            return json.load(matrix_file)
    return value


def cmd_generate(arguments: argparse.Namespace, settings: Settings) -> int:
    """Write a benchmark program to a file or standard output.

    :param arguments: Parsed command line arguments
    :param settings: Loaded application settings
    :return: EXIT_UNREACHABLE
    """
    if arguments.family == "shortest-path":
        text = gen_shortest_path(
            arguments.nodes, _read_matrix(arguments.matrix), arguments.bound
        )
    elif arguments.family == "bitsum":
        text = gen_bitsum(arguments.bits)
    else:
        text = gen_abduction_example()

    if arguments.output:
        Path(arguments.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_UNREACHABLE


COMMANDS = {
    "verify": cmd_verify,
    "compare": cmd_compare,
    "run": cmd_run,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    """Command line entry point.

    :param argv: Arguments without the program name
    :return: Exit code
    """
    arguments = parse_arguments(argv)
    setup_logging(arguments.quiet, arguments.verbose)
    try:
        settings = load_settings(arguments.config)
        return COMMANDS[arguments.command](arguments, settings)
    except (InterpolseError, OSError, ValueError) as error:
        print(f"{arguments.command}: {error}", file=sys.stderr)
        return EXIT_ERROR
