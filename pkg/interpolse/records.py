# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Run Record Module."""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from interpolse import __version__
from interpolse.engine import (
    ExplorationConfig,
    ExplorationStats,
    Reachable,
    Timeout,
    Unreachable,
    Verdict,
)
from interpolse.errors import RecordError

VERDICTS = ("reachable", "unreachable", "timeout")


def verdict_name(verdict: Verdict) -> str:
    if isinstance(verdict, Reachable):
        return "reachable"
    if isinstance(verdict, Unreachable):
        return "unreachable"
    if isinstance(verdict, Timeout):
        return "timeout"
    raise RecordError(f"unknown verdict {verdict!r}")


@dataclass(frozen=True)
class RunRecord:
    """Machine-readable summary of one exploration.

    :param program_path: Program file that was explored
    :param mode: ``dsei`` or ``vanilla``
    :param strategy: ``dfs`` or ``random``
    :param seed: Seed of the random strategy
    :param loop_bound: Loop bound of the run
    :param timeout_s: Wall-clock budget in seconds
    :param verdict: ``reachable``, ``unreachable`` or ``timeout``
    :param witness: Input assignment of a reachable verdict
    :param stats: Exploration statistics by name
    :param tool_version: interpolse version that produced the record
    """

    program_path: str
    mode: str
    strategy: str
    seed: int
    loop_bound: int
    timeout_s: float | None
    verdict: str
    witness: dict[str, int] | None = None
    stats: dict[str, Any] = field(default_factory=dict)
    tool_version: str = __version__

    @classmethod
    def from_run(
        cls,
        program_path: str | Path,
        config: ExplorationConfig,
        verdict: Verdict,
        stats: ExplorationStats,
    ) -> "RunRecord":
        witness = dict(verdict.model) if isinstance(verdict, Reachable) else None
        return cls(
            program_path=str(program_path),
            mode=config.mode,
            strategy=config.strategy,
            seed=config.seed,
            loop_bound=config.loop_bound,
            timeout_s=config.timeout,
            verdict=verdict_name(verdict),
            witness=witness,
            stats=stats.as_dict(),
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "RunRecord":
        if not isinstance(values, dict):
            raise RecordError("run record is not a JSON object")
        names = {f.name for f in fields(cls)}
        missing = names - values.keys() - {"witness", "stats", "tool_version"}
        if missing:
            raise RecordError(f"run record lacks {', '.join(sorted(missing))}")
        if values["verdict"] not in VERDICTS:
            raise RecordError(f"unknown verdict {values['verdict']!r}")
        return cls(**{k: v for k, v in values.items() if k in names})

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def dump(self, path: Path | str):
        """Write the record as a UTF-8 JSON document.

        :param path: Destination file
        """
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> "RunRecord":
        """Read a record written by :meth:`dump`.

        :param path: Source file
        :return: The record
        """
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as error:
            raise RecordError(f"{path} is not valid JSON: {error}") from error
        return cls.from_dict(values)
