"""
test_gap_calculator.py

Tests for throughput gaps, SNR gains and the table layout.
"""

import os
import sys
import unittest
import numpy as np
import pandas as pd

# Add the parent directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mimoswitch.errors import ConfigError, MissingSchemeError
from mimoswitch.simulation.gap_calculator import (
    COMPACT_TABLE_COLUMNS,
    TABLE_COLUMNS,
    build_table,
    gap_table,
    snr_gain_table,
)


def _summary(curves):
    """Summary frame from {scheme: {snr_db: mean_tput}}."""
    rows = []
    for scheme, points in curves.items():
        for snr_db, value in points.items():
            rows.append({'scheme': scheme, 'snr_db': snr_db, 'mean_tput': value, 'stderr': 0.0,
                         'channels': 10, 'rejected': 0})
    return pd.DataFrame(rows)


class TestGapTable(unittest.TestCase):
    """Relative gaps per SNR point."""

    def test_small_gap(self):
        summary = _summary({'opposite_phase': {0.0: 0.1270}, 'maxmin_sdr': {0.0: 0.1271}})
        gaps = gap_table(summary, 'opposite_phase', 'maxmin_sdr')
        self.assertEqual(list(gaps.columns), ['snr_db', 'baseline', 'comparison', 'delta_pct'])
        self.assertAlmostEqual(gaps['delta_pct'].iloc[0], 0.0787, places=4)

    def test_identical_curves(self):
        curve = {0.0: 0.2, 10.0: 0.9}
        gaps = gap_table(_summary({'a': curve, 'b': curve}), 'a', 'b')
        np.testing.assert_array_equal(gaps['delta_pct'], [0.0, 0.0])

    def test_negative_gap(self):
        gaps = gap_table(_summary({'a': {10.0: 1.0}, 'b': {10.0: 0.9}}), 'a', 'b')
        self.assertAlmostEqual(gaps['delta_pct'].iloc[0], -10.0)

    def test_missing_scheme(self):
        summary = _summary({'a': {0.0: 0.5}})
        with self.assertRaises(MissingSchemeError):
            gap_table(summary, 'a', 'b')

    def test_missing_snr_point(self):
        summary = _summary({'a': {0.0: 0.5, 10.0: 1.0}, 'b': {0.0: 0.6}})
        with self.assertRaises(MissingSchemeError):
            gap_table(summary, 'a', 'b')


class TestSnrGain(unittest.TestCase):
    """Horizontal curve distances."""

    def test_constant_shift(self):
        snrs = [0.0, 10.0, 20.0, 30.0]
        summary = _summary({
            'base': {s: s / 10.0 for s in snrs},
            'better': {s: (s + 3.0) / 10.0 for s in snrs},
        })
        gains = snr_gain_table(summary, 'base', 'better')
        np.testing.assert_allclose(gains['gain_db'].iloc[:3], [3.0, 3.0, 3.0])
        # 3.3 is above every baseline level
        self.assertTrue(np.isnan(gains['gain_db'].iloc[3]))
        self.assertEqual(list(gains.columns), ['snr_db', 'comparison_tput', 'baseline_snr_db', 'gain_db'])


class TestBuildTable(unittest.TestCase):
    """Table layout with Δ columns."""

    def test_columns_and_values(self):
        snrs = [0.0, 10.0]
        summary = _summary({
            'opposite_phase': {0.0: 0.10, 10.0: 0.50},
            'maxmin_exhaustive': {0.0: 0.11, 10.0: 0.55},
            'maxmin_sdr': {0.0: 0.11, 10.0: 0.50},
            'pnc_phase_aligned': {0.0: 0.20, 10.0: 0.80},
            'pnc_maxmin_sdr': {0.0: 0.22, 10.0: 0.80},
        })
        table = build_table(summary, 'maxmin_exhaustive')
        self.assertEqual(list(table.columns), TABLE_COLUMNS)
        self.assertEqual(list(table['snr_db']), snrs)
        np.testing.assert_allclose(table['maxmin_reference_delta_pct'], [10.0, 10.0])
        np.testing.assert_allclose(table['maxmin_sdr_delta_pct'], [10.0, 0.0])
        np.testing.assert_allclose(table['pnc_maxmin_sdr_delta_pct'], [10.0, 0.0])
        np.testing.assert_allclose(table['pnc_phase_aligned'], [0.20, 0.80])

    def test_missing_column_scheme(self):
        summary = _summary({'opposite_phase': {0.0: 0.1}, 'sdr_upper': {0.0: 0.2}})
        with self.assertRaises(MissingSchemeError):
            build_table(summary, 'sdr_upper')

    def test_compact_layout_needs_no_network_coding(self):
        summary = _summary({
            'opposite_phase': {0.0: 0.10, 30.0: 3.0},
            'sdr_upper': {0.0: 0.12, 30.0: 3.0},
            'maxmin_sdr': {0.0: 0.11, 30.0: 2.97},
        })
        table = build_table(summary, 'sdr_upper', layout='compact')
        self.assertEqual(list(table.columns), COMPACT_TABLE_COLUMNS)
        self.assertEqual(len(table.columns), 6)
        np.testing.assert_allclose(table['maxmin_reference_delta_pct'], [20.0, 0.0])
        np.testing.assert_allclose(table['maxmin_sdr_delta_pct'], [10.0, -1.0])

    def test_unknown_layout(self):
        summary = _summary({'opposite_phase': {0.0: 0.1}, 'sdr_upper': {0.0: 0.2}, 'maxmin_sdr': {0.0: 0.2}})
        with self.assertRaises(ConfigError):
            build_table(summary, 'sdr_upper', layout='wide')


if __name__ == '__main__':
    unittest.main()
