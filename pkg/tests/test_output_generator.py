"""
test_output_generator.py

Tests for the files written from sweep results.
"""

import json
import os
import shutil
import sys
import tempfile
import unittest
import pandas as pd

# Add the parent directory to sys.path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from mimoswitch.simulation.gap_calculator import gap_table
from mimoswitch.simulation.output_generator import (
    create_output_directory,
    generate_gnuplot_data,
    generate_provenance,
    generate_samples_output,
    generate_summary_output,
    generate_table_output,
)
from mimoswitch.simulation.sweep import SAMPLE_COLUMNS, SUMMARY_COLUMNS, SimConfig, run_sweep


class TestOutputGenerator(unittest.TestCase):
    """Summary, samples, tables, provenance and gnuplot files."""

    @classmethod
    def setUpClass(cls):
        cls.result = run_sweep(SimConfig(n=2, snr_points_db=(0.0, 10.0), channels=2,
                                         schemes=('basic', 'opposite_phase'), seed=4, threads=1))

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_create_output_directory(self):
        nested = os.path.join(self.temp_dir, 'a', 'b')
        self.assertEqual(create_output_directory(nested), nested)
        self.assertTrue(os.path.isdir(nested))
        # Existing directory is fine
        create_output_directory(nested)

    def test_summary_csv(self):
        path = generate_summary_output(self.result, 'run', self.temp_dir)
        self.assertTrue(path.endswith('run_summary.csv'))
        written = pd.read_csv(path)
        self.assertEqual(list(written.columns), SUMMARY_COLUMNS)
        self.assertEqual(len(written), 4)
        self.assertAlmostEqual(written['mean_tput'].iloc[0], self.result.summary['mean_tput'].iloc[0], places=8)

    def test_summary_json(self):
        path = generate_summary_output(self.result, 'run', self.temp_dir, fmt='json')
        self.assertTrue(path.endswith('run_summary.json'))
        with open(path, 'r', encoding='utf-8') as f:
            records = json.load(f)
        self.assertEqual(len(records), 4)
        self.assertEqual(set(records[0]), set(SUMMARY_COLUMNS))
        self.assertEqual(records[0]['scheme'], 'basic')

    def test_samples_csv(self):
        written = pd.read_csv(generate_samples_output(self.result, 'run', self.temp_dir))
        self.assertEqual(list(written.columns), SAMPLE_COLUMNS)
        self.assertEqual(len(written), 2 * 2 * 2)

    def test_table_output(self):
        table = gap_table(self.result.summary, 'basic', 'opposite_phase')
        csv_path = generate_table_output(table, 'run', self.temp_dir)
        json_path = generate_table_output(table, 'run', self.temp_dir, fmt='json')
        self.assertEqual(list(pd.read_csv(csv_path).columns), list(table.columns))
        with open(json_path, 'r', encoding='utf-8') as f:
            self.assertEqual(len(json.load(f)), 2)

    def test_provenance(self):
        path = generate_provenance(self.result, 'run', self.temp_dir, extra={'preset': 'custom'})
        with open(path, 'r', encoding='utf-8') as f:
            record = json.load(f)
        self.assertEqual(record['config_hash'], self.result.config.config_hash())
        self.assertEqual(record['seed'], 4)
        self.assertEqual(record['schemes'], ['basic', 'opposite_phase'])
        self.assertEqual(record['failed_solves'], 0)
        self.assertEqual(record['preset'], 'custom')
        self.assertEqual(record['config']['channels'], 2)

    def test_gnuplot_data(self):
        path = generate_gnuplot_data(self.result, 'run', self.temp_dir)
        self.assertTrue(path.endswith('run.dat'))
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], '# snr_db basic opposite_phase')
        self.assertEqual(len(lines), 3)
        fields = lines[2].split()
        self.assertEqual(float(fields[0]), 10.0)
        self.assertAlmostEqual(float(fields[2]), self.result.curve('opposite_phase').loc[10.0], places=8)

    def test_rewrites_are_identical(self):
        first = generate_provenance(self.result, 'run', self.temp_dir)
        with open(first, 'rb') as f:
            content = f.read()
        generate_provenance(self.result, 'run', self.temp_dir)
        with open(first, 'rb') as f:
            self.assertEqual(f.read(), content)


if __name__ == '__main__':
    unittest.main()
