# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Dynamic symbolic execution with interpolation-based pruning."""

__version__ = "1.0.0"
