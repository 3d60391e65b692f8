#!/usr/bin/env python
"""
Script to reproduce both worst-station throughput tables.

Usage:
    python scripts/reproduce_tables.py [options]

Options are passed to both `mimoswitch table1` and `mimoswitch table2`
(e.g. --channels 500 --out results/). The exit code is the first nonzero one.
"""

import sys

from mimoswitch.cli.main import main

if __name__ == "__main__":
    codes = [main([command] + sys.argv[1:]) for command in ('table1', 'table2')]
    sys.exit(next((code for code in codes if code), 0))
