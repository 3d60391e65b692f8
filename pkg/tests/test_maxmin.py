"""
test_maxmin.py

Tests for the maxmin designs: the min-power relaxation, the bisection solver,
the two-station grid reference, the relaxation bound and the alternating
network-coded solver.
"""

import os
import sys
import unittest
import warnings
import numpy as np

# Add the parent directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mimoswitch.core.model import (
    ChannelRealization,
    NoiseParams,
    SwitchSpec,
    compute_Q,
    compute_S,
    post_noise,
    relay_power,
    sample_channel,
)
from mimoswitch.errors import ConfigError, InfeasibleCapsError, PairingError
from mimoswitch.optimization.eqsnr import (
    closed_form_two_station,
    opposite_phase,
    phase_aligned_gains,
    pnc_phase_aligned,
)
from mimoswitch.optimization.maxmin import (
    IterativeConfig,
    SdrConfig,
    gaussian_draws,
    maxmin_exhaustive_2,
    maxmin_solve,
    noise_caps,
    noise_minimizing_b,
    pnc_fix_a_step,
    pnc_fix_b_step,
    pnc_maxmin_iterate,
    power_quadratic,
    qcqp_min_power,
    sdr_upper_bound,
)

QUICK = SdrConfig(samples=50)


class TestMinPower(unittest.TestCase):
    """Relaxation and rounding at a fixed noise target."""

    def test_noiseless_relay(self):
        ch = sample_channel(4, 3)
        sw = SwitchSpec.pairwise(4)
        np_ = NoiseParams(gamma2=0.0, sigma2=0.1)
        q = np.real(np.diag(compute_Q(ch, sw, np_)))
        S = compute_S(ch, sw, np_)

        solution = qcqp_min_power(ch, sw, np_, 0.5, q, S, QUICK)
        expected = np_.sigma2 / 0.5 * np.real(np.trace(ch.W))
        self.assertAlmostEqual(solution.power / expected, 1.0, places=9)
        self.assertAlmostEqual(solution.lower_bound / expected, 1.0, places=6)
        np.testing.assert_allclose(np.abs(solution.a), np.sqrt(np_.sigma2 / 0.5), rtol=1e-9)

    def test_rounded_solution_meets_targets(self):
        ch = sample_channel(4, 12)
        sw = SwitchSpec.non_pairwise(4)
        np_ = NoiseParams.from_snr_db(10.0)
        q = np.real(np.diag(compute_Q(ch, sw, np_)))
        S = compute_S(ch, sw, np_)
        target = float(np.max(q)) - 1.0 + 0.5

        solution = qcqp_min_power(ch, sw, np_, target, q, S, QUICK)
        self.assertTrue(np.all(post_noise(ch, sw, np_, solution.a) <= target * (1 + 1e-9)))
        self.assertLessEqual(solution.lower_bound, solution.power * (1 + 1e-7))
        self.assertIn(solution.candidate, ('eigenvector', 'random_unit', 'eigenvector_scaled', 'random_scaled'))

    def test_two_station_power_matches_grid(self):
        sw = SwitchSpec.pairwise(2)
        np_ = NoiseParams.from_snr_db(10.0)
        for seed in range(10):
            ch = sample_channel(2, 900 + seed)
            q = np.real(np.diag(compute_Q(ch, sw, np_)))
            S = compute_S(ch, sw, np_)
            target = float(np.max(q)) - 1.0 + 0.3
            r = np_.sigma2 / (target + 1.0 - q)

            # Opposite phases are optimal; for each |a1| the best |a2| is closed form
            s11, s22, s12 = float(np.real(S[0, 0])), float(np.real(S[1, 1])), abs(S[0, 1])
            m1 = np.sqrt(r[0]) * np.linspace(1.0, 10.0, 20000)
            m2 = np.maximum(np.sqrt(r[1]), s12 * m1 / s22)
            grid = float(np.min(s11 * m1 ** 2 + s22 * m2 ** 2 - 2 * s12 * m1 * m2))

            solution = qcqp_min_power(ch, sw, np_, target, q, S, QUICK)
            self.assertLessEqual(solution.power, grid * 1.02)
            self.assertGreaterEqual(solution.power, grid * (1 - 1e-3))

    def test_target_below_edge_rejected(self):
        ch = sample_channel(2, 0)
        sw = SwitchSpec.pairwise(2)
        np_ = NoiseParams.from_snr_db(0.0)
        q = np.real(np.diag(compute_Q(ch, sw, np_)))
        with self.assertRaises(ValueError):
            qcqp_min_power(ch, sw, np_, float(np.max(q)) - 1.0, q, compute_S(ch, sw, np_), QUICK)

    def test_gaussian_draws(self):
        draws = gaussian_draws(3, 10, seed=5)
        self.assertEqual(draws.shape, (3, 10))
        np.testing.assert_array_equal(draws, gaussian_draws(3, 10, seed=5))

    def test_invalid_config(self):
        with self.assertRaises(ValueError):
            SdrConfig(samples=0)
        with self.assertRaises(ValueError):
            SdrConfig(eps_tolerance=0.0)
        with self.assertRaises(ValueError):
            IterativeConfig(init='random')


class TestMaxminSolve(unittest.TestCase):
    """Bisection on the noise target."""

    def test_identity_channel(self):
        ch = ChannelRealization.from_matrix(np.eye(2))
        np_ = NoiseParams(gamma2=0.1, sigma2=0.1)
        outcome = maxmin_solve(ch, SwitchSpec.pairwise(2), np_, QUICK)
        self.assertAlmostEqual(outcome.worst_epsilon, 0.32, delta=0.32 * 1e-4)
        self.assertAlmostEqual(outcome.power_used, 1.0, places=9)

    def test_noiseless_relay(self):
        np_ = NoiseParams(gamma2=0.0, sigma2=0.1)
        for n, sw in ((2, SwitchSpec.pairwise(2)), (4, SwitchSpec.non_pairwise(4))):
            ch = sample_channel(n, 40 + n)
            outcome = maxmin_solve(ch, sw, np_, QUICK)
            expected = np_.sigma2 * np.real(np.trace(ch.W)) / np_.p
            self.assertAlmostEqual(outcome.worst_epsilon / expected, 1.0, places=6)

    def test_uses_full_budget(self):
        ch = sample_channel(4, 22)
        np_ = NoiseParams.from_snr_db(20.0)
        outcome = maxmin_solve(ch, SwitchSpec.pairwise(4), np_, QUICK)
        self.assertAlmostEqual(outcome.power_used / np_.p, 1.0, places=9)
        lo, hi = outcome.diagnostics['eps_bracket']
        self.assertLessEqual(lo, hi)
        self.assertLessEqual(outcome.worst_epsilon, hi * (1 + 1e-9))
        self.assertLessEqual(outcome.diagnostics['relaxation_power'],
                             outcome.diagnostics['rounded_power'] * (1 + 1e-7))

    def test_not_worse_than_equal_snr(self):
        sw = SwitchSpec.pairwise(2)
        for snr_db in (0.0, 20.0):
            np_ = NoiseParams.from_snr_db(snr_db)
            for seed in range(10):
                ch = sample_channel(2, 60 + seed)
                maxmin = maxmin_solve(ch, sw, np_, QUICK).worst_epsilon
                self.assertLessEqual(maxmin, closed_form_two_station(ch, sw, np_).worst_epsilon * (1 + 1e-4))

    def test_deterministic(self):
        ch = sample_channel(4, 9)
        np_ = NoiseParams.from_snr_db(10.0)
        sw = SwitchSpec.non_pairwise(4)
        first = maxmin_solve(ch, sw, np_, QUICK)
        second = maxmin_solve(ch, sw, np_, QUICK)
        np.testing.assert_array_equal(first.design.a, second.design.a)


class TestExhaustiveReference(unittest.TestCase):
    """Two-station grid search."""

    def setUp(self):
        self.sw = SwitchSpec.pairwise(2)

    def test_identity_channel(self):
        ch = ChannelRealization.from_matrix(np.eye(2))
        np_ = NoiseParams(gamma2=0.1, sigma2=0.1)
        outcome = maxmin_exhaustive_2(ch, self.sw, np_)
        self.assertAlmostEqual(outcome.worst_epsilon / 0.32, 1.0, places=6)
        self.assertAlmostEqual(outcome.power_used, 1.0, places=9)

    def test_agrees_with_closed_form_and_relaxation(self):
        np_ = NoiseParams.from_snr_db(10.0)
        for seed in (1, 2, 3):
            ch = sample_channel(2, seed)
            grid = maxmin_exhaustive_2(ch, self.sw, np_)
            closed = closed_form_two_station(ch, self.sw, np_)
            relaxed = maxmin_solve(ch, self.sw, np_, QUICK)
            self.assertAlmostEqual(grid.power_used / np_.p, 1.0, delta=1e-8)
            self.assertLessEqual(grid.worst_epsilon, closed.worst_epsilon)
            self.assertGreaterEqual(grid.worst_epsilon / closed.worst_epsilon, 0.99)
            self.assertLessEqual(abs(relaxed.worst_epsilon - grid.worst_epsilon) / grid.worst_epsilon, 0.005)

    def test_never_worse_than_closed_form(self):
        for snr_db in (0.0, 10.0, 30.0):
            np_ = NoiseParams.from_snr_db(snr_db)
            for seed in range(60):
                ch = sample_channel(2, 700 + seed)
                grid = maxmin_exhaustive_2(ch, self.sw, np_, magnitude_points=50, phase_points=16)
                closed = closed_form_two_station(ch, self.sw, np_)
                self.assertLessEqual(grid.worst_epsilon, closed.worst_epsilon, f"seed {seed} at {snr_db} dB")
                self.assertAlmostEqual(grid.power_used / np_.p, 1.0, delta=1e-8)

    def test_no_runtime_warnings(self):
        ch = sample_channel(2, 2)
        with warnings.catch_warnings():
            warnings.simplefilter('error', RuntimeWarning)
            maxmin_exhaustive_2(ch, self.sw, NoiseParams.from_snr_db(10.0), magnitude_points=50, phase_points=16)

    def test_requirements(self):
        np_ = NoiseParams.from_snr_db(0.0)
        with self.assertRaises(ConfigError):
            maxmin_exhaustive_2(sample_channel(4, 0), SwitchSpec.pairwise(4), np_)
        with self.assertRaises(ValueError):
            maxmin_exhaustive_2(sample_channel(2, 0), self.sw, np_, magnitude_points=1)


class TestRelaxationBound(unittest.TestCase):
    """Throughput bound from the relaxation value."""

    def test_bound_above_achieved(self):
        np_ = NoiseParams.from_snr_db(10.0)
        for sw in (SwitchSpec.pairwise(4), SwitchSpec.non_pairwise(4)):
            ch = sample_channel(4, 77)
            bound = sdr_upper_bound(ch, sw, np_, QUICK)
            achieved = maxmin_solve(ch, sw, np_, QUICK)
            self.assertGreaterEqual(bound, achieved.worst_throughput - 1e-7)
            if sw.is_pairwise:
                self.assertGreaterEqual(bound, opposite_phase(ch, sw, np_).worst_throughput - 1e-7)


class TestNetworkCodedSteps(unittest.TestCase):
    """a-step, b-step and the power quadratic in b."""

    def setUp(self):
        self.ch = sample_channel(4, 14)
        self.sw = SwitchSpec.pairwise(4, pnc=True)
        self.np_ = NoiseParams.from_snr_db(10.0)

    def test_b_step_with_zero_b_matches_zero_forcing(self):
        coded = pnc_fix_b_step(self.ch, self.sw, self.np_, np.zeros(4), QUICK)
        plain = maxmin_solve(self.ch, self.sw.with_pnc(False), self.np_, QUICK)
        np.testing.assert_allclose(coded.epsilon, plain.epsilon, rtol=1e-12)

    def test_power_quadratic_matches_relay_power(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        omega = power_quadratic(self.ch, self.sw, self.np_, a)
        self.assertAlmostEqual(omega(b) / relay_power(self.ch, self.sw, self.np_, a, b), 1.0, places=9)
        self.assertAlmostEqual(omega.c0 / relay_power(self.ch, self.sw, self.np_, a), 1.0, places=9)

        columns = np.column_stack([b, np.zeros(4)])
        np.testing.assert_allclose(omega(columns), [omega(b), omega.c0])

    def test_identity_channel_keeps_zero_b(self):
        ch = ChannelRealization.from_matrix(np.eye(2))
        np_ = NoiseParams(gamma2=0.1, sigma2=0.1)
        a = np.full(2, 1 / np.sqrt(2.2))
        b = pnc_fix_a_step(ch, SwitchSpec.pairwise(2, pnc=True), np_, a, 0.4, QUICK)
        np.testing.assert_allclose(b, np.zeros(2), atol=1e-12)

    def test_a_step_meets_caps_and_lowers_power(self):
        start = pnc_fix_b_step(self.ch, self.sw, self.np_, np.zeros(4), QUICK)
        a, eps = start.design.a, start.worst_epsilon
        b = pnc_fix_a_step(self.ch, self.sw, self.np_, a, eps, QUICK, incumbent_b=np.zeros(4))

        self.assertTrue(np.all(post_noise(self.ch, self.sw, self.np_, a, b) <= eps * (1 + 1e-9)))
        self.assertLessEqual(relay_power(self.ch, self.sw, self.np_, a, b),
                             relay_power(self.ch, self.sw, self.np_, a) * (1 + 1e-9))

    def test_caps_are_disks(self):
        start = pnc_fix_b_step(self.ch, self.sw, self.np_, np.zeros(4), QUICK)
        caps = noise_caps(self.ch, self.sw, self.np_, start.design.a, start.worst_epsilon)
        boundary = caps.center + caps.radius * np.exp(0.7j)
        np.testing.assert_allclose(post_noise(self.ch, self.sw, self.np_, start.design.a, boundary),
                                   start.worst_epsilon, rtol=1e-8)

    def test_infeasible_caps(self):
        a = np.ones(4, dtype=complex)
        eps = 0.5 * self.np_.sigma2
        with self.assertRaises(InfeasibleCapsError):
            pnc_fix_a_step(self.ch, self.sw, self.np_, a, eps, QUICK)

    def test_a_step_needs_network_coding(self):
        with self.assertRaises(ConfigError):
            pnc_fix_a_step(self.ch, self.sw.with_pnc(False), self.np_, np.ones(4), 1.0, QUICK)


class TestAlternatingSolver(unittest.TestCase):
    """Block-coordinate descent over a and b."""

    def setUp(self):
        self.np_ = NoiseParams.from_snr_db(10.0)

    def test_history_never_increases(self):
        ch = sample_channel(2, 5)
        sw = SwitchSpec.pairwise(2, pnc=True)
        outcome = pnc_maxmin_iterate(ch, sw, self.np_, IterativeConfig(max_alternations=4, init='zero'), QUICK)

        history = outcome.diagnostics['history']
        self.assertTrue(all(later <= earlier for earlier, later in zip(history, history[1:])))
        self.assertEqual(outcome.diagnostics['alternations'], len(history) - 1)
        self.assertEqual(outcome.diagnostics['init'], 'zero')
        self.assertAlmostEqual(outcome.power_used / self.np_.p, 1.0, places=6)

        start = pnc_fix_b_step(ch, sw, self.np_, np.zeros(2), QUICK)
        self.assertLessEqual(outcome.worst_epsilon, start.worst_epsilon)

    def test_phase_aligned_start(self):
        ch = sample_channel(4, 6)
        sw = SwitchSpec.pairwise(4, pnc=True)
        cfg = IterativeConfig(max_alternations=2, init='phase_aligned')
        outcome = pnc_maxmin_iterate(ch, sw, self.np_, cfg, QUICK)
        self.assertEqual(outcome.diagnostics['init'], 'phase_aligned')
        self.assertLessEqual(outcome.worst_epsilon, outcome.diagnostics['history'][0])

    def test_zero_start_reaches_network_coding_gain(self):
        sw = SwitchSpec.pairwise(2, pnc=True)
        for seed in range(5):
            ch = sample_channel(2, 300 + seed)
            aligned = pnc_phase_aligned(ch, sw, self.np_).worst_epsilon
            plain = closed_form_two_station(ch, sw.with_pnc(False), self.np_).worst_epsilon
            outcome = pnc_maxmin_iterate(ch, sw, self.np_, IterativeConfig(init='zero'), QUICK)
            self.assertGreater(outcome.diagnostics['alternations'], 0)
            self.assertLessEqual(outcome.worst_epsilon, aligned * (1 + 1e-3))
            self.assertLess(outcome.worst_epsilon, plain)

    def test_start_does_not_matter(self):
        sw = SwitchSpec.pairwise(2, pnc=True)
        for seed in range(5):
            ch = sample_channel(2, 400 + seed)
            zero = pnc_maxmin_iterate(ch, sw, self.np_, IterativeConfig(init='zero'), QUICK)
            aligned = pnc_maxmin_iterate(ch, sw, self.np_, IterativeConfig(init='phase_aligned'), QUICK)
            self.assertAlmostEqual(zero.worst_epsilon / aligned.worst_epsilon, 1.0, delta=0.01)

    def test_default_start_is_the_better_one(self):
        ch = sample_channel(4, 8)
        sw = SwitchSpec.non_pairwise(4, pnc=True)
        outcome = pnc_maxmin_iterate(ch, sw, self.np_, IterativeConfig(max_alternations=3), QUICK)
        self.assertIn(outcome.diagnostics['init'], ('zero', 'noise_min'))
        plain = maxmin_solve(ch, sw.with_pnc(False), self.np_, QUICK)
        self.assertLessEqual(outcome.worst_epsilon, plain.worst_epsilon * (1 + 1e-9))

    def test_noise_minimizing_b_is_phase_aligned_on_pairs(self):
        ch = sample_channel(4, 10)
        sw = SwitchSpec.pairwise(4, pnc=True)
        np.testing.assert_allclose(noise_minimizing_b(ch, sw), phase_aligned_gains(ch, sw), rtol=1e-12)
        caps = noise_caps(ch, sw, self.np_, np.ones(4), 10.0)
        np.testing.assert_allclose(caps.center, noise_minimizing_b(ch, sw), rtol=1e-12)

    def test_requirements(self):
        ch = sample_channel(4, 6)
        with self.assertRaises(ConfigError):
            pnc_maxmin_iterate(ch, SwitchSpec.pairwise(4), self.np_, sdr=QUICK)
        with self.assertRaises(PairingError):
            pnc_maxmin_iterate(ch, SwitchSpec.non_pairwise(4, pnc=True), self.np_,
                               IterativeConfig(init='phase_aligned'), QUICK)
        with self.assertRaises(ConfigError):
            pnc_maxmin_iterate(ch, SwitchSpec.pairwise(4, pnc=True), self.np_,
                               IterativeConfig(initial_b=(0j, 0j)), QUICK)


if __name__ == '__main__':
    unittest.main()
