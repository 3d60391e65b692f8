#!/usr/bin/env python
"""
Script to run the property suites.

Usage:
    python scripts/verify.py [--seed N] [--trials N]
"""

import sys

from mimoswitch.cli.main import main

if __name__ == "__main__":
    sys.exit(main(['verify'] + sys.argv[1:]))
