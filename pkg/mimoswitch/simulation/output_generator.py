"""
output_generator.py

Writes sweep results to disk:
1. Summary per (scheme, SNR) as CSV or JSON
2. Per-channel samples as CSV
3. Throughput tables with Δ columns
4. A JSON provenance record with the full config, its hash and the seed
5. gnuplot-ready .dat files, one column per scheme

Nothing written here carries a timestamp, so reruns with the same config and
seed produce identical files.
"""

import json
import os
import numpy as np
import pandas as pd
from typing import Dict, List, Optional
import logging

from mimoswitch.simulation.sweep import SUMMARY_COLUMNS, SimResult

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.10g'


def create_output_directory(output_dir: str = 'output') -> str:
    """
    Create the output directory if it doesn't exist.

    Args:
        output_dir (str): Path to the output directory

    Returns:
        str: Path to the output directory
    """
    try:
        if not os.path.exists(output_dir):
            os.makedirs(output_dir)
            logger.info(f"Created output directory: {output_dir}")

        return output_dir

    except Exception as e:
        logger.error(f"Error creating output directory: {str(e)}")
        raise


def generate_summary_output(result: SimResult, name: str, output_dir: str = 'output',
                            fmt: str = 'csv') -> str:
    """
    Write the long-format summary: one row per scheme and SNR point.

    Args:
        result (SimResult): Sweep result
        name (str): File name stem
        output_dir (str): Output directory
        fmt (str): 'csv' or 'json'

    Returns:
        str: Path to the written file
    """
    logger.info(f"Generating summary output for '{name}'")

    try:
        output_dir = create_output_directory(output_dir)
        summary = result.summary[SUMMARY_COLUMNS]

        if fmt == 'json':
            output_file = os.path.join(output_dir, f'{name}_summary.json')
            records = json.loads(summary.to_json(orient='records', double_precision=15))
            with open(output_file, 'w', encoding='utf-8') as f:
                json.dump(records, f, indent=2)
        else:
            output_file = os.path.join(output_dir, f'{name}_summary.csv')
            summary.to_csv(output_file, index=False, float_format=FLOAT_FORMAT)

        logger.info(f"Generated summary output file: {output_file}")
        return output_file

    except Exception as e:
        logger.error(f"Error generating summary output: {str(e)}")
        raise


def generate_samples_output(result: SimResult, name: str, output_dir: str = 'output') -> str:
    """Write the per-channel samples as CSV."""
    logger.info(f"Generating per-channel samples for '{name}'")

    try:
        output_dir = create_output_directory(output_dir)
        output_file = os.path.join(output_dir, f'{name}_samples.csv')
        result.samples.to_csv(output_file, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"Generated samples output file: {output_file}")
        return output_file

    except Exception as e:
        logger.error(f"Error generating samples output: {str(e)}")
        raise


def generate_table_output(table: pd.DataFrame, name: str, output_dir: str = 'output',
                          fmt: str = 'csv') -> str:
    """
    Write a throughput table.

    Args:
        table (pd.DataFrame): Table from gap_calculator.build_table
        name (str): File name stem
        output_dir (str): Output directory
        fmt (str): 'csv' or 'json'

    Returns:
        str: Path to the written file
    """
    logger.info(f"Generating table output for '{name}'")

    try:
        output_dir = create_output_directory(output_dir)
        if fmt == 'json':
            output_file = os.path.join(output_dir, f'{name}_table.json')
            records = json.loads(table.to_json(orient='records', double_precision=15))
            with open(output_file, 'w', encoding='utf-8') as f:
                json.dump(records, f, indent=2)
        else:
            output_file = os.path.join(output_dir, f'{name}_table.csv')
            table.to_csv(output_file, index=False, float_format=FLOAT_FORMAT)

        logger.info(f"Generated table output file: {output_file}")
        return output_file

    except Exception as e:
        logger.error(f"Error generating table output: {str(e)}")
        raise


def generate_provenance(result: SimResult, name: str, output_dir: str = 'output',
                        extra: Optional[Dict] = None) -> str:
    """
    Write the full effective config with its hash, seed and run counts as JSON.

    Args:
        result (SimResult): Sweep result
        name (str): File name stem
        output_dir (str): Output directory
        extra (Optional[Dict]): Additional entries (e.g. preset name)

    Returns:
        str: Path to the written file
    """
    try:
        output_dir = create_output_directory(output_dir)
        record = {
            'name': name,
            'config_hash': result.config_hash,
            'seed': result.seed,
            'config': result.config.to_dict(),
            'schemes': result.schemes,
            'failed_solves': int(result.samples['failed'].sum()),
            'rejected_channels': int(result.samples.groupby('channel')['rejections'].first().gt(0).sum()),
        }
        record.update(extra or {})

        output_file = os.path.join(output_dir, f'{name}_provenance.json')
        with open(output_file, 'w', encoding='utf-8') as f:
            json.dump(record, f, indent=2, sort_keys=True)

        logger.info(f"Generated provenance file: {output_file}")
        return output_file

    except Exception as e:
        logger.error(f"Error generating provenance: {str(e)}")
        raise


def generate_gnuplot_data(result: SimResult, name: str, output_dir: str = 'output') -> str:
    """
    Write mean throughput curves as whitespace-separated columns.

    The first line is a comment naming the columns: snr_db, then one column
    per scheme in configured order. Missing values are written as NaN.

    Returns:
        str: Path to the .dat file
    """
    try:
        output_dir = create_output_directory(output_dir)
        schemes: List[str] = result.schemes
        wide = result.summary.pivot(index='snr_db', columns='scheme', values='mean_tput')
        wide = wide.reindex(columns=schemes).sort_index()

        output_file = os.path.join(output_dir, f'{name}.dat')
        with open(output_file, 'w', encoding='utf-8') as f:
            f.write('# snr_db ' + ' '.join(schemes) + '\n')
            for snr_db, row in wide.iterrows():
                values = ' '.join('NaN' if np.isnan(v) else FLOAT_FORMAT % v for v in row.to_numpy(dtype=float))
                f.write(f"{FLOAT_FORMAT % snr_db} {values}\n")

        logger.info(f"Generated gnuplot data file: {output_file}")
        return output_file

    except Exception as e:
        logger.error(f"Error generating gnuplot data: {str(e)}")
        raise
