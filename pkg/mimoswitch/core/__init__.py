"""
Core model of the relay switch.

This package contains:
    - numerics: guarded inversion, PSD checks, quartic real roots
    - model: channels, switch patterns, precoder assembly, noise and power functionals
"""
