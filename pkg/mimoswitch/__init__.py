"""
mimoswitch - precoder design for a multi-antenna relay used as a circuit switch.

A relay with N antennas serves N single-antenna stations and forwards each
station's signal to the station chosen by a permutation. This package designs
the relay precoder for zero-forcing and network-coded relaying under the
max-min SNR and equal-SNR criteria, and measures the schemes by Monte Carlo
simulation.

Main modules:
    - core: channel model, noise and power functionals, numerical helpers
    - optimization: SDP solver, equal-SNR and maxmin solvers
    - simulation: scheme registry, SNR sweeps, tables, config files and outputs
    - cli: command-line interface and property suites

Example usage:
    from mimoswitch.core.model import NoiseParams, SwitchSpec, sample_channel
    from mimoswitch.optimization.eqsnr import opposite_phase

    ch = sample_channel(4, rng_seed=1)
    outcome = opposite_phase(ch, SwitchSpec.pairwise(4), NoiseParams.from_snr_db(10.0))
    print(outcome.worst_throughput)
"""

__version__ = '1.0.0'
