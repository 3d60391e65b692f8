"""
Command-line interface.

    - main: the `mimoswitch` command (table1, table2, sweep, single, verify)
    - verify: property suites run by `mimoswitch verify`

The command is registered as a console entry point in setup.py.
"""
