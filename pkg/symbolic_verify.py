# Copyright (c) 2024 The interpolse authors
# interpolse is released under the terms of the Apache License 2.0
# SPDX-License-Identifier: Apache-2.0
#
# vim: set noai syntax=python ts=4 sw=4:
"""Symbolic Verification of Small Imperative Programs."""
import sys

from interpolse.cli import main

if __name__ == "__main__":
    sys.exit(main())
