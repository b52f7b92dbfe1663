# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Testing Application Settings Module."""
import json

import pytest

from interpolse.errors import SettingsError
from interpolse.settings import (
    DEBUG_ASSERT_ENV,
    DEFAULT_CONFIG_FILE,
    Settings,
    debug_assert_enabled,
    load_settings,
)


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    monkeypatch.delenv(DEBUG_ASSERT_ENV, raising=False)
    monkeypatch.chdir(tmp_path)


def write_config(path, values) -> str:
    path.write_text(json.dumps(values), encoding="utf-8")
    return str(path)


def test_defaults():
    settings = load_settings()
    assert settings == Settings()
    assert settings.loop_bound == 64
    assert settings.strategy == "dfs"


def test_load_with_coercion(tmp_path):
    path = write_config(
        tmp_path / "custom.json",
        {"settings": {"loop_bound": "7", "timeout": 5, "seed": 2.0, "colour": "red"}},
    )
    settings = load_settings(path)
    assert settings.loop_bound == 7
    assert settings.timeout == 5.0
    assert isinstance(settings.timeout, float)
    assert settings.seed == 2
    assert settings.branch_depth == 64


@pytest.mark.parametrize(
    "value, expected",
    [
        (True, True),
        (False, False),
        ("false", False),
        ("TRUE", True),
        ("0", False),
        (1, True),
    ],
)
def test_debug_assert_coercion(tmp_path, value, expected):
    path = write_config(tmp_path / "flag.json", {"settings": {"debug_assert": value}})
    assert load_settings(path).debug_assert is expected


def test_default_file_in_working_directory(tmp_path):
    write_config(tmp_path / DEFAULT_CONFIG_FILE, {"settings": {"strategy": "random"}})
    assert load_settings().strategy == "random"


@pytest.mark.parametrize(
    "content",
    [
        {"settings": {"strategy": "bfs"}},
        {"settings": {"loop_bound": "many"}},
        {"settings": {"debug_assert": "sometimes"}},
        {"settings": {"debug_assert": 2}},
        {"settings": [1, 2]},
        [1, 2],
    ],
)
def test_invalid_settings(tmp_path, content):
    path = write_config(tmp_path / "bad.json", content)
    with pytest.raises(SettingsError):
        load_settings(path)


def test_unreadable_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{settings", encoding="utf-8")
    with pytest.raises(SettingsError):
        load_settings(path)


def test_missing_explicit_file(tmp_path):
    with pytest.raises(SettingsError):
        load_settings(tmp_path / "absent.json")


@pytest.mark.parametrize(
    "value, enabled", [("1", True), ("yes", True), ("0", False), ("", False)]
)
def test_debug_assert_environment(monkeypatch, tmp_path, value, enabled):
    monkeypatch.setenv(DEBUG_ASSERT_ENV, value)
    assert debug_assert_enabled() is enabled
    assert load_settings().debug_assert is enabled
    path = write_config(tmp_path / "off.json", {"settings": {"debug_assert": False}})
    assert load_settings(path).debug_assert is enabled
