# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Testing Benchmark Program Generators Module."""
import pytest

from interpolse.benchmarks import (
    FOUR_NODE_MATRIX,
    as_edges,
    gen_bitsum,
    gen_shortest_path,
    layered_random,
    monotone_paths,
    validate_edges,
)
from interpolse.engine import Unreachable, run_vanilla
from interpolse.errors import InvalidMatrix
from interpolse.lang import parse_program


def test_four_node_paths():
    paths = monotone_paths(4, FOUR_NODE_MATRIX)
    assert paths == [
        ([1, 2, 3, 4], 120),
        ([1, 2, 4], 110),
        ([1, 3, 4], 95),
        ([1, 4], 110),
    ]
    assert min(distance for _, distance in paths) == 95


def test_as_edges_from_rows():
    rows = [[0] * 4 for _ in range(4)]
    rows[1][2], rows[1][3], rows[2][3] = 5, 9, 1
    edges = as_edges(rows, 3)
    assert edges == {(1, 2): 5, (1, 3): 9, (2, 3): 1}
    assert as_edges("four-node", 4) == FOUR_NODE_MATRIX
    assert as_edges({("1", "2"): 3}, 2) == {(1, 2): 3}


def test_as_edges_rejects_unknown_name():
    with pytest.raises(InvalidMatrix):
        as_edges("grid", 4)


@pytest.mark.parametrize(
    "n, edges",
    [
        (1, {}),
        (3, {(2, 1): 4, (1, 3): 1}),
        (3, {(1, 2): 0, (2, 3): 1}),
        (3, {(1, 2): 2.5, (2, 3): 1}),
        (3, {(1, 3): 2}),
        (3, {(1, 2): 1, (2, 4): 1}),
    ],
)
def test_validate_edges(n, edges):
    with pytest.raises(InvalidMatrix):
        validate_edges(n, edges)


@pytest.mark.parametrize("seed", [0, 1, 17])
def test_layered_random(seed):
    edges = layered_random(8, seed)
    validate_edges(8, edges)
    assert edges == as_edges(f"layered-random({seed})", 8)
    assert edges == layered_random(8, seed)


def test_shortest_path_program(shortest_path):
    program = shortest_path(90)
    assert [v.name for v in program.symbolic_vars] == ["next1", "next2"]
    assert (program.symbolic_vars[0].low, program.symbolic_vars[0].high) == (2, 4)
    assert program.program_names == ("node", "d")
    assert len(program.system.loop_heads) == 1


def test_shortest_path_placeholder():
    text = gen_shortest_path(4, "four-node")
    assert "assert (d >= BOUND)" in text
    assert "BOUND" not in gen_shortest_path(4, "four-node", 50)


def test_layered_random_program_parses():
    program = parse_program(gen_shortest_path(6, "layered-random(3)", 100))
    assert program.targets


def test_bitsum_program():
    program = parse_program(gen_bitsum(3))
    assert [v.name for v in program.symbolic_vars] == ["b1", "b2", "b3"]
    assert program.program_names == ("k1", "k2", "k3")
    assert len(program.system.branch_points) == 5
    with pytest.raises(ValueError):
        gen_bitsum(0)


def test_vanilla_leaves_match_path_count():
    program = parse_program(gen_shortest_path(6, "layered-random(7)", 0))
    verdict, stats = run_vanilla(program)
    assert isinstance(verdict, Unreachable)
    assert stats.leaves == len(monotone_paths(6, layered_random(6, 7)))
