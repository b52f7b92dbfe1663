# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Benchmark Program Generators Module."""

import random
import re
from collections.abc import Mapping, Sequence
from functools import cache

from interpolse.errors import InvalidMatrix

Edges = dict[tuple[int, int], int]

FOUR_NODE_MATRIX: Edges = {
    (1, 2): 20,
    (1, 3): 35,
    (1, 4): 110,
    (2, 3): 40,
    (2, 4): 90,
    (3, 4): 60,
}

ABDUCTION_EXAMPLE = """\
// The guard on x is decided by abduction; the else path of t is pruned.
sym t
sym x in [0, 1]
var u = 0
var y = 0
var z = 1
if (t > 0) {
} else {
    y = 5
    z = 3
}
if (x > 0) {
    u = x + 1
    z = z + 33
} else {
    u = x + 3
    y = 2*z - y - 2
}
assert (u > -3)
assert (u < 6)
assert (y < z)
"""

_LAYERED_RE = re.compile(r"^layered-random\((-?\d+)\)$")


def layered_random(n: int, seed: int) -> Edges:
    """Random monotone DAG in which every node below ``n`` has an out-edge.

    :param n: Node count
    :param seed: Random seed
    :return: Edge weights keyed by (from, to)
    """
    rng = random.Random(seed)
    edges: Edges = {}
    for node in range(1, n):
        later = list(range(node + 1, n + 1))
        count = rng.randint(1, min(3, len(later)))
        for target in sorted(rng.sample(later, count)):
            edges[(node, target)] = rng.randint(1, 100)
    return edges


def as_edges(matrix: Mapping | Sequence | str, n: int) -> Edges:
    """Normalize a matrix argument into edge weights.

    :param matrix: Edge mapping, ``(n+1) x (n+1)`` list of lists (row and
        column 0 unused, 0 or None for no edge), ``"four-node"``, or
        ``"layered-random(SEED)"``
    :param n: Node count
    :return: Edge weights keyed by (from, to)
    """
    if isinstance(matrix, str):
        if matrix == "four-node":
            return dict(FOUR_NODE_MATRIX)
        match = _LAYERED_RE.match(matrix.strip())
        if not match:
            raise InvalidMatrix(f"unknown matrix specification {matrix!r}")
        return layered_random(n, int(match.group(1)))

    if isinstance(matrix, Mapping):
        return {(int(i), int(j)): w for (i, j), w in matrix.items()}

    edges: Edges = {}
    for i, row in enumerate(matrix):
        for j, weight in enumerate(row):
            if weight:
                edges[(i, j)] = weight
    return edges


def validate_edges(n: int, edges: Edges):
    """Check that edges form a forward DAG over nodes ``1..n``.

    :param n: Number of nodes
    :param edges: Positive integer weight per ``(i, j)`` edge
    :raises InvalidMatrix: An edge goes backwards, leaves ``1..n`` or has
        a non-positive weight, or a node before ``n`` has no outgoing edge
    """
    if n < 2:
        raise InvalidMatrix(f"need at least 2 nodes, got {n}")
    for (i, j), weight in edges.items():
        if not (1 <= i < j <= n):
            raise InvalidMatrix(f"edge {i}->{j} is not a forward edge within 1..{n}")
        if not isinstance(weight, int) or isinstance(weight, bool) or weight <= 0:
            raise InvalidMatrix(f"edge {i}->{j} has non-positive weight {weight!r}")
    for node in range(1, n):
        if not any(i == node for i, _ in edges):
            raise InvalidMatrix(f"node {node} has no outgoing edge")


def successors(edges: Edges, node: int) -> list[tuple[int, int]]:
    """Outgoing ``(target, weight)`` pairs of a node, by target."""
    return sorted((j, w) for (i, j), w in edges.items() if i == node)


def _indent(lines: list[str], depth: int) -> list[str]:
    return ["    " * depth + line for line in lines]


def _node_block(node: int, targets: list[tuple[int, int]]) -> list[str]:
    if len(targets) == 1:
        target, weight = targets[0]
        return [f"d = d + {weight}", f"node = {target}"]
    (target, weight), rest = targets[0], targets[1:]
    lines = [f"if (next{node} == {target}) {{"]
    lines += _indent([f"d = d + {weight}", f"node = {target}"], 1)
    lines.append("} else {")
    lines += _indent(_node_block(node, rest), 1)
    lines.append("}")
    return lines


def _dispatch(nodes: list[int], blocks: dict[int, list[str]]) -> list[str]:
    node, rest = nodes[0], nodes[1:]
    lines = [f"if (node == {node}) {{"]
    lines += _indent(blocks[node], 1)
    if rest:
        lines.append("} else {")
        lines += _indent(_dispatch(rest, blocks), 1)
    lines.append("}")
    return lines


def gen_shortest_path(
    n: int, matrix: Mapping | Sequence | str, bound: int | None = None
) -> str:
    """Program walking a weighted DAG from node 1 to node ``n``.

    Every node with several successors reads its choice from a bounded
    symbolic input ``nextK``; the last successor is taken for any value
    not matching an earlier one. The accumulated distance ``d`` must
    reach ``bound``.

    :param n: Node count
    :param matrix: Edge weights, see :func:`as_edges`
    :param bound: Minimum distance asserted at the end; without one the
        program asserts against a ``BOUND`` placeholder
    :return: Program text
    """
    edges = as_edges(matrix, n)
    validate_edges(n, edges)
    bound = "BOUND" if bound is None else bound

    lines = [f"// shortest path over {n} nodes, assert d >= {bound}"]
    for node in range(1, n):
        targets = successors(edges, node)
        if len(targets) > 1:
            lines.append(f"sym next{node} in [{targets[0][0]}, {targets[-1][0]}]")
    lines += ["var node = 1", "var d = 0"]

    blocks = {node: _node_block(node, successors(edges, node)) for node in range(1, n)}
    lines.append(f"while (node < {n}) {{")
    lines += _indent(_dispatch(list(range(1, n)), blocks), 1)
    lines.append("}")
    lines.append(f"assert (d >= {bound})")
    return "\n".join(lines) + "\n"


def monotone_paths(n: int, edges: Edges) -> list[tuple[list[int], int]]:
    """Every path from node 1 to node ``n`` with its distance.

    :param n: Node count
    :param edges: Edge weights
    :return: (nodes, distance) pairs in depth-first order
    """

    @cache
    def walk(node: int) -> tuple[tuple[tuple[int, ...], int], ...]:
        if node == n:
            return (((n,), 0),)
        result = []
        for target, weight in successors(edges, node):
            for nodes, distance in walk(target):
                result.append(((node,) + nodes, distance + weight))
        return tuple(result)

    return [(list(nodes), distance) for nodes, distance in walk(1)]


def gen_bitsum(n: int) -> str:
    """Program of ``n`` independent +1/-1 choices with a two-sided sum check.

    :param n: Number of input bits
    :return: Program text
    """
    if n < 1:
        raise ValueError(f"need at least 1 bit, got {n}")
    total = " + ".join(f"k{j}" for j in range(1, n + 1))
    lines = [f"// bit sum over {n} inputs"]
    lines += [f"sym b{j} in [0, 1]" for j in range(1, n + 1)]
    lines += [f"var k{j} = 0" for j in range(1, n + 1)]
    for j in range(1, n + 1):
        lines.append(f"if (b{j} == 1) {{ k{j} = 1 }} else {{ k{j} = -1 }}")
    lines.append(f"assert ({total} >= -{n})")
    lines.append(f"assert ({total} <= {n})")
    return "\n".join(lines) + "\n"


def gen_abduction_example() -> str:
    return ABDUCTION_EXAMPLE
