"""
test_eqsnr.py

Tests for the equal-SNR designs: the fixed-phase ε solver, the two-station
closed form, the phase heuristics and the network-coded variants.
"""

import os
import sys
import unittest
import numpy as np

# Add the parent directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mimoswitch.core.model import ChannelRealization, NoiseParams, SwitchSpec, pair_coefficients, sample_channel
from mimoswitch.errors import ConfigError, PairingError
from mimoswitch.optimization.eqsnr import (
    EpsSearchConfig,
    PhaseSearchConfig,
    closed_form_two_station,
    opposite_phase,
    pnc_identical_b,
    pnc_phase_aligned,
    random_phase,
    solve_eps_given_phases,
    two_station_quartic,
)


class EqualSnrAssertions:
    """Shared checks on equal-SNR outcomes."""

    def assertEqualSnr(self, outcome, np_):
        self.assertLessEqual(outcome.epsilon_spread, 1e-8 * float(np.mean(outcome.epsilon)))
        self.assertAlmostEqual(outcome.power_used / np_.p, 1.0, places=9)


class TestSolveEpsGivenPhases(unittest.TestCase, EqualSnrAssertions):
    """ε for fixed phases."""

    def test_identity_channel(self):
        ch = ChannelRealization.from_matrix(np.eye(2))
        np_ = NoiseParams(gamma2=0.1, sigma2=0.1)
        outcome = solve_eps_given_phases(ch, SwitchSpec.pairwise(2), np_, [0.3, 1.7])
        self.assertAlmostEqual(outcome.worst_epsilon, 0.32, places=10)
        np.testing.assert_allclose(np.abs(outcome.design.a), np.full(2, 1 / np.sqrt(2.2)), rtol=1e-9)
        np.testing.assert_allclose(np.angle(outcome.design.a), [0.3, 1.7], atol=1e-12)

    def test_noiseless_relay(self):
        ch = sample_channel(4, 17)
        np_ = NoiseParams(gamma2=0.0, sigma2=0.1)
        outcome = solve_eps_given_phases(ch, SwitchSpec.non_pairwise(4), np_, np.zeros(4))
        expected = np_.sigma2 * np.real(np.trace(ch.W)) / np_.p
        self.assertAlmostEqual(outcome.worst_epsilon / expected, 1.0, places=9)

    def test_contract_on_random_channels(self):
        np_ = NoiseParams.from_snr_db(20.0)
        rng = np.random.default_rng(1)
        for seed in range(5):
            ch = sample_channel(4, seed)
            for sw in (SwitchSpec.pairwise(4), SwitchSpec.non_pairwise(4)):
                outcome = solve_eps_given_phases(ch, sw, np_, rng.uniform(0, 2 * np.pi, 4))
                self.assertEqualSnr(outcome, np_)
                self.assertAlmostEqual(outcome.diagnostics['epsilon_target'] / outcome.worst_epsilon, 1.0, places=9)
                lo, hi = outcome.diagnostics['bracket']
                self.assertLessEqual(lo, hi)

    def test_invalid_phases(self):
        ch = sample_channel(2, 0)
        with self.assertRaises(ValueError):
            solve_eps_given_phases(ch, SwitchSpec.pairwise(2), NoiseParams.from_snr_db(0.0), [0.0])
        with self.assertRaises(ValueError):
            solve_eps_given_phases(ch, SwitchSpec.pairwise(2), NoiseParams.from_snr_db(0.0), [0.0, np.nan])

    def test_invalid_search_config(self):
        with self.assertRaises(ValueError):
            EpsSearchConfig(expansion=1.0)
        with self.assertRaises(ValueError):
            PhaseSearchConfig(bins=1)
        with self.assertRaises(ValueError):
            PhaseSearchConfig(trials=0)


class TestTwoStation(unittest.TestCase, EqualSnrAssertions):
    """Closed form for N = 2."""

    def setUp(self):
        self.sw = SwitchSpec.pairwise(2)

    def test_identity_channel(self):
        ch = ChannelRealization.from_matrix(np.eye(2))
        np_ = NoiseParams(gamma2=0.1, sigma2=0.1)
        outcome = closed_form_two_station(ch, self.sw, np_)
        self.assertAlmostEqual(outcome.worst_epsilon, 0.32, places=7)
        np.testing.assert_allclose(np.real(outcome.design.a), [1 / np.sqrt(2.2), -1 / np.sqrt(2.2)], atol=1e-7)

    def test_quartic_coefficients_for_identity_channel(self):
        q = two_station_quartic(1.1, 1.1, 0.0, 0.0, 0.1, 1.0)
        np.testing.assert_allclose(q.as_array(), [0.0, 0.0, 0.0484, -0.044, 0.01], atol=1e-15)

    def test_matches_opposite_phase(self):
        for snr_db in (0.0, 10.0, 20.0, 30.0):
            np_ = NoiseParams.from_snr_db(snr_db)
            for seed in range(5):
                ch = sample_channel(2, 100 + seed)
                closed = closed_form_two_station(ch, self.sw, np_)
                searched = opposite_phase(ch, self.sw, np_)
                self.assertEqualSnr(closed, np_)
                self.assertAlmostEqual(closed.worst_epsilon / searched.worst_epsilon, 1.0, delta=1e-7)

    def test_admissible_root_found_without_fallback(self):
        for snr_db in (0.0, 10.0, 20.0, 30.0):
            np_ = NoiseParams.from_snr_db(snr_db)
            for seed in range(200):
                ch = sample_channel(2, 5000 + seed)
                closed = closed_form_two_station(ch, self.sw, np_)
                self.assertNotIn('fallback', closed.diagnostics, f"seed {seed} at {snr_db} dB")
                self.assertLessEqual(closed.epsilon_spread, 1e-6 * closed.worst_epsilon)
                self.assertAlmostEqual(closed.power_used / np_.p, 1.0, delta=1e-7)

    def test_beats_phase_grid(self):
        np_ = NoiseParams.from_snr_db(10.0)
        ch = sample_channel(2, 31)
        closed = closed_form_two_station(ch, self.sw, np_).worst_epsilon
        grid = 2 * np.pi * np.arange(64) / 64
        best = min(solve_eps_given_phases(ch, self.sw, np_, [0.0, delta]).worst_epsilon for delta in grid)
        self.assertLessEqual(closed, best * (1 + 1e-9))

    def test_beats_random_phase(self):
        np_ = NoiseParams.from_snr_db(20.0)
        ch = sample_channel(2, 41)
        closed = closed_form_two_station(ch, self.sw, np_).worst_epsilon
        searched = random_phase(ch, self.sw, np_, PhaseSearchConfig(trials=20)).worst_epsilon
        self.assertLessEqual(closed, searched * (1 + 1e-9))

    def test_needs_two_stations(self):
        with self.assertRaises(ConfigError):
            closed_form_two_station(sample_channel(4, 0), SwitchSpec.pairwise(4), NoiseParams.from_snr_db(0.0))


class TestPhaseHeuristics(unittest.TestCase, EqualSnrAssertions):
    """Opposite and random phase designs."""

    def setUp(self):
        self.ch = sample_channel(4, 5)
        self.np_ = NoiseParams.from_snr_db(10.0)

    def test_opposite_phase_signs(self):
        sw = SwitchSpec.pairwise(4)
        outcome = opposite_phase(self.ch, sw, self.np_)
        self.assertEqualSnr(outcome, self.np_)
        a = outcome.design.a
        for pi, kappa in sw.pairs:
            self.assertGreater(np.real(a[pi]), 0)
            self.assertLess(np.real(a[kappa]), 0)

    def test_opposite_phase_needs_pairs(self):
        with self.assertRaises(PairingError):
            opposite_phase(self.ch, SwitchSpec.non_pairwise(4), self.np_)

    def test_random_phase_is_deterministic(self):
        sw = SwitchSpec.non_pairwise(4)
        cfg = PhaseSearchConfig(bins=2, trials=5, seed=9)
        first = random_phase(self.ch, sw, self.np_, cfg)
        second = random_phase(self.ch, sw, self.np_, cfg)
        np.testing.assert_array_equal(first.design.a, second.design.a)
        self.assertEqual(first.diagnostics['trials'], 5)
        self.assertEqual(first.diagnostics['bins'], 2)
        self.assertEqualSnr(first, self.np_)

    def test_more_trials_never_worse(self):
        sw = SwitchSpec.non_pairwise(4)
        few = random_phase(self.ch, sw, self.np_, PhaseSearchConfig(trials=3, seed=4))
        many = random_phase(self.ch, sw, self.np_, PhaseSearchConfig(trials=30, seed=4))
        self.assertLessEqual(many.worst_epsilon, few.worst_epsilon)

    def test_binary_phases(self):
        outcome = random_phase(self.ch, SwitchSpec.pairwise(4), self.np_, PhaseSearchConfig(bins=2, trials=4))
        phases = np.mod(np.angle(outcome.design.a), 2 * np.pi)
        distance = np.minimum(np.abs(phases), np.abs(phases - np.pi))
        distance = np.minimum(distance, np.abs(phases - 2 * np.pi))
        self.assertTrue(np.all(distance < 1e-9))


class TestNetworkCoding(unittest.TestCase, EqualSnrAssertions):
    """Phase-aligned and identical-b network-coded designs."""

    def setUp(self):
        self.ch = sample_channel(4, 8)
        self.np_ = NoiseParams.from_snr_db(10.0)
        self.sw = SwitchSpec.pairwise(4, pnc=True)

    def test_identity_channel_needs_no_cancellation(self):
        ch = ChannelRealization.from_matrix(np.eye(2))
        np_ = NoiseParams(gamma2=0.1, sigma2=0.1)
        outcome = pnc_phase_aligned(ch, SwitchSpec.pairwise(2, pnc=True), np_)
        np.testing.assert_allclose(outcome.design.b, np.zeros(2), atol=1e-15)
        self.assertAlmostEqual(outcome.worst_epsilon, 0.32, places=10)

    def test_phase_aligned_pair_noise(self):
        outcome = pnc_phase_aligned(self.ch, self.sw, self.np_)
        self.assertEqualSnr(outcome, self.np_)
        gains = np.abs(outcome.design.a) ** 2
        for pi, kappa in self.sw.pairs:
            h1, h2, h3 = pair_coefficients(self.ch, (pi, kappa))
            m2 = abs(h2) ** 2
            expected_pi = self.np_.gamma2 * (h3 - m2 / h1) + self.np_.sigma2 / gains[pi]
            expected_kappa = self.np_.gamma2 * (h1 - m2 / h3) + self.np_.sigma2 / gains[kappa]
            self.assertAlmostEqual(outcome.epsilon[pi] / expected_pi, 1.0, places=9)
            self.assertAlmostEqual(outcome.epsilon[kappa] / expected_kappa, 1.0, places=9)
        self.assertTrue(all(value <= 0 for value in outcome.diagnostics['lambda']))

    def test_phase_aligned_requirements(self):
        with self.assertRaises(ConfigError):
            pnc_phase_aligned(self.ch, self.sw.with_pnc(False), self.np_)
        with self.assertRaises(PairingError):
            pnc_phase_aligned(self.ch, SwitchSpec.non_pairwise(4, pnc=True), self.np_)

    def test_zero_grid_reduces_to_random_phase(self):
        cfg = PhaseSearchConfig(trials=6, seed=3)
        sw = SwitchSpec.non_pairwise(4)
        plain = random_phase(self.ch, sw, self.np_, cfg)
        for per_element in (False, True):
            coded = pnc_identical_b(self.ch, sw.with_pnc(True), self.np_, cfg, b_grid=[0.0],
                                    per_element_phase=per_element)
            self.assertAlmostEqual(coded.worst_epsilon, plain.worst_epsilon, places=12)
            self.assertEqual(coded.diagnostics['b'], 0.0)

    def test_denser_grid_never_worse(self):
        cfg = PhaseSearchConfig(trials=4, seed=1)
        sw = SwitchSpec.non_pairwise(4, pnc=True)
        coarse = pnc_identical_b(self.ch, sw, self.np_, cfg, b_grid=[-1.0, 0.0, 1.0])
        dense = pnc_identical_b(self.ch, sw, self.np_, cfg, b_grid=[-1.0, -0.5, 0.0, 0.5, 1.0])
        self.assertLessEqual(dense.worst_epsilon, coarse.worst_epsilon)
        self.assertEqual(dense.diagnostics['grid_size'], 5)
        self.assertIn(dense.diagnostics['b'], [-1.0, -0.5, 0.0, 0.5, 1.0])
        self.assertEqualSnr(dense, self.np_)

    def test_grid_must_contain_zero(self):
        with self.assertRaises(ValueError):
            pnc_identical_b(self.ch, self.sw, self.np_, b_grid=[-1.0, 1.0])

    def test_identical_b_needs_network_coding(self):
        with self.assertRaises(ConfigError):
            pnc_identical_b(self.ch, self.sw.with_pnc(False), self.np_)


if __name__ == '__main__':
    unittest.main()
