# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Testing Search Strategy Module."""
import random
from collections import Counter
from dataclasses import dataclass

import pytest

from interpolse.errors import SettingsError
from interpolse.search import Frontier, choose_index, choose_next


@dataclass(eq=False)
class Entry:
    point: str
    depth: int = 0
    parent: "Entry | None" = None
    pending: int = 0


def test_dfs_takes_latest():
    frontier = [Entry("a"), Entry("b"), Entry("c")]
    assert choose_index(frontier, "dfs", random.Random(0)) == 2
    assert choose_next(frontier, "dfs", random.Random(0)).point == "c"


def test_single_and_empty_frontier():
    assert choose_index([Entry("a")], "random", random.Random(0)) == 0
    with pytest.raises(IndexError):
        choose_index([], "dfs", random.Random(0))


def test_unknown_strategy():
    with pytest.raises(SettingsError):
        choose_index([Entry("a"), Entry("b")], "bfs", random.Random(0))
    with pytest.raises(SettingsError):
        Frontier("bfs")


def test_coverage_picker_avoids_visited_points():
    frontier = [Entry("hot"), Entry("cold")]
    visits = Counter({"hot": 10**9})
    picks = {choose_index(frontier, "random", random.Random(s), visits, 1) for s in range(20)}
    assert picks == {1}


def test_closing_picker_prefers_last_sibling():
    open_parent = Entry("p", pending=2)
    closing_parent = Entry("q", pending=1)
    frontier = [
        Entry("deep", depth=9, parent=open_parent),
        Entry("close", depth=3, parent=closing_parent),
        Entry("other", depth=5, parent=open_parent),
    ]
    assert choose_index(frontier, "random", random.Random(0), turn=2) == 1


def test_frontier_is_reproducible():
    def drain(seed: int) -> list[str]:
        frontier = Frontier("random", seed)
        for name in "abcdefgh":
            frontier.push(Entry(name))
        return [frontier.pop().point for _ in range(len(frontier))]

    assert drain(5) == drain(5)
    assert sorted(drain(5)) == list("abcdefgh")


def test_frontier_counts_visits():
    frontier = Frontier()
    frontier.push(Entry("a"))
    frontier.push(Entry("a"))
    assert frontier.pop().point == "a"
    assert frontier.visits["a"] == 1
    assert frontier.turn == 1
    assert len(frontier) == 1
