# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Application Settings Module."""

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from interpolse.errors import SettingsError

DEFAULT_CONFIG_FILE = "interpolse.json"
DEBUG_ASSERT_ENV = "INTERPOLSE_DEBUG_ASSERT"


@dataclass(frozen=True)
class Settings:
    """Defaults shared by the engine, the solver and the command line.

    :param timeout: Wall-clock budget of one exploration, in seconds
    :param loop_bound: Maximum number of iterations explored per loop
    :param branch_depth: Branch-and-bound depth of the integer solver
    :param enumerate_cap: Largest domain the brute-force oracle walks
    :param step_budget: Transition budget of a concrete replay
    :param strategy: Default search strategy, ``dfs`` or ``random``
    :param seed: Seed of the random strategy
    :param debug_assert: Re-check contracts at run time
    """

    timeout: float = 60.0
    loop_bound: int = 64
    branch_depth: int = 64
    enumerate_cap: int = 1_000_000
    step_budget: int = 100_000
    strategy: str = "dfs"
    seed: int = 0
    debug_assert: bool = False


def debug_assert_enabled() -> bool:
    """Returns True when contract assertions are switched on.

    :return: Value of the INTERPOLSE_DEBUG_ASSERT environment variable
        read as a flag
    """
    return os.environ.get(DEBUG_ASSERT_ENV, "").strip() not in ("", "0", "false")


BOOLEAN_STRINGS = {"true": True, "false": False, "1": True, "0": False}


def _coerce(name: str, value: Any, default: Any) -> Any:
    try:
        if isinstance(default, bool):
            if isinstance(value, bool):
                return value
            if isinstance(value, int) and value in (0, 1):
                return bool(value)
            if isinstance(value, str) and value.strip().lower() in BOOLEAN_STRINGS:
                return BOOLEAN_STRINGS[value.strip().lower()]
            raise ValueError(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as error:
        raise SettingsError(f"invalid value for '{name}': {value!r}") from error


def load_settings(config_path: Path | str | None = None) -> Settings:
    """Load application settings from a JSON configuration file.

    The file holds a top-level ``settings`` object. Unknown keys are
    ignored and missing keys keep their defaults. When no path is given
    and ``interpolse.json`` does not exist in the working directory,
    the defaults are returned.

    :param config_path: Optional path to the configuration file
    :return: A Settings object
    """
    settings = Settings(debug_assert=debug_assert_enabled())
    path = Path(config_path) if config_path else Path(DEFAULT_CONFIG_FILE)
    if not path.exists():
        if config_path:
            raise SettingsError(f"configuration file {path} not found")
        return settings

    try:
        with path.open(mode="r", encoding="utf-8") as config_file:
            config_dict = json.load(config_file)
    except (OSError, json.JSONDecodeError) as error:
        raise SettingsError(f"could not read {path}: {error}") from error

    if not isinstance(config_dict, dict):
        raise SettingsError(f"{path} does not hold a JSON object")

    values = config_dict.get("settings", {})
    if not isinstance(values, dict):
        raise SettingsError(f"'settings' in {path} is not an object")

    overrides = {}
    for field in fields(Settings):
        if field.name in values:
            overrides[field.name] = _coerce(
                field.name, values[field.name], getattr(settings, field.name)
            )

    if overrides.get("strategy", settings.strategy) not in ("dfs", "random"):
        raise SettingsError(f"unknown strategy {overrides['strategy']!r}")

    settings = replace(settings, **overrides)
    if debug_assert_enabled():
        settings = replace(settings, debug_assert=True)

    return settings
