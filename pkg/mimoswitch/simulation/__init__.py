"""
Monte Carlo experiments.

This package contains:
    - schemes: registry of comparable relaying schemes and the scalar-gain benchmark
    - sweep: SNR sweeps over shared channel realizations
    - gap_calculator: Δ(%) tables and SNR gains between schemes
    - presets: named table and curve experiments
    - config_loader: JSON experiment files
    - output_generator: CSV, JSON and gnuplot outputs
"""
