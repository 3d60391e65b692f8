"""
Relay design solvers.

This package contains:
    - sdp: small dense Hermitian SDP solver (interior point)
    - eqsnr: equal-SNR designs (closed form, opposite phase, random phase, network-coded)
    - maxmin: maxmin designs (relaxation and randomization, grid reference, alternating a/b)
"""
