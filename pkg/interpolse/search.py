# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Search Strategy Module.

Frontier entries are engine nodes; the pickers only read their
``point``, ``depth`` and ``parent.pending`` attributes.
"""

import random
from collections import Counter
from collections.abc import Sequence
from typing import Any

from interpolse.errors import SettingsError

STRATEGIES = ("dfs", "random")
PICKERS = ("uniform", "coverage", "closing")


def _closes_parent(node: Any) -> bool:
    return node.parent is None or node.parent.pending == 1


def choose_index(
    frontier: Sequence[Any],
    strategy: str,
    rng: random.Random,
    visits: Counter | None = None,
    turn: int = 0,
) -> int:
    """Index of the next frontier entry to explore.

    ``dfs`` takes the most recent entry. ``random`` cycles through three
    pickers by ``turn``: a uniform pick, a pick weighted by
    ``1 / (1 + visits of the entry's point)``, and the deepest entry whose
    siblings have all completed (uniform when there is none).

    :param frontier: Pending entries in insertion order
    :param strategy: ``dfs`` or ``random``
    :param rng: Seeded random generator
    :param visits: Expansions per program point so far
    :param turn: Number of picks already made
    :return: Index into ``frontier``
    """
    if not frontier:
        raise IndexError("empty frontier")
    if len(frontier) == 1:
        return 0
    if strategy == "dfs":
        return len(frontier) - 1
    if strategy != "random":
        raise SettingsError(f"unknown strategy {strategy!r}")

    picker = PICKERS[turn % len(PICKERS)]
    if picker == "coverage":
        visits = visits or Counter()
        weights = [1.0 / (1 + visits[node.point]) for node in frontier]
        return rng.choices(range(len(frontier)), weights=weights)[0]
    if picker == "closing":
        candidates = [i for i, node in enumerate(frontier) if _closes_parent(node)]
        if candidates:
            return max(candidates, key=lambda i: (frontier[i].depth, i))
    return rng.randrange(len(frontier))


def choose_next(
    frontier: Sequence[Any],
    strategy: str,
    rng: random.Random,
    visits: Counter | None = None,
    turn: int = 0,
) -> Any:
    return frontier[choose_index(frontier, strategy, rng, visits, turn)]


class Frontier:
    """Worklist of nodes waiting for expansion.

    :param strategy: ``dfs`` or ``random``
    :param seed: Seed of the random pickers
    """

    def __init__(self, strategy: str = "dfs", seed: int = 0):
        """Class initialization method."""
        if strategy not in STRATEGIES:
            raise SettingsError(f"unknown strategy {strategy!r}")
        self.strategy = strategy
        self.rng = random.Random(seed)
        self.visits: Counter = Counter()
        self.turn = 0
        self._items: list[Any] = []

    def __len__(self) -> int:
        return len(self._items)

    def push(self, node: Any):
        self._items.append(node)

    def pop(self) -> Any:
        index = choose_index(self._items, self.strategy, self.rng, self.visits, self.turn)
        self.turn += 1
        node = self._items.pop(index)
        self.visits[node.point] += 1
        return node
