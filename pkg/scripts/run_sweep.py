#!/usr/bin/env python
"""
Script to run a throughput sweep.

Usage:
    python scripts/run_sweep.py [--preset NAME | --config FILE] [options]

Alternative Usage (CLI Tool):
    mimoswitch sweep [options]

For detailed options, run:
    python scripts/run_sweep.py --help
"""

import sys

from mimoswitch.cli.main import main

if __name__ == "__main__":
    sys.exit(main(['sweep'] + sys.argv[1:]))
