"""
gap_calculator.py

Comparisons between schemes in a sweep summary:
1. Relative throughput gap Δ(%) of one scheme against a baseline per SNR point
2. SNR gain in dB: how much more SNR the baseline needs to match a scheme
3. Table layout with equal-SNR, maxmin and network-coded columns side by side

A positive Δ means the comparison scheme has the higher mean worst-station
throughput.
"""

import numpy as np
import pandas as pd
from typing import List, Optional
import logging

from mimoswitch.errors import ConfigError, MissingSchemeError

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

TABLE_COLUMNS = [
    'snr_db',
    'opposite_phase',
    'maxmin_reference', 'maxmin_reference_delta_pct',
    'maxmin_sdr', 'maxmin_sdr_delta_pct',
    'pnc_phase_aligned',
    'pnc_maxmin_sdr', 'pnc_maxmin_sdr_delta_pct',
]
COMPACT_TABLE_COLUMNS = TABLE_COLUMNS[:6]
TABLE_LAYOUTS = ('full', 'compact')


def _curve(summary: pd.DataFrame, scheme: str, snr_points: Optional[List[float]] = None) -> pd.Series:
    rows = summary[summary['scheme'] == scheme]
    if rows.empty:
        raise MissingSchemeError(f"Scheme '{scheme}' is not in the result")
    curve = rows.set_index('snr_db')['mean_tput']
    if snr_points is not None:
        missing = [s for s in snr_points if s not in curve.index]
        if missing:
            raise MissingSchemeError(f"Scheme '{scheme}' has no result at SNR {missing} dB")
        curve = curve.loc[snr_points]
    return curve


def gap_table(summary: pd.DataFrame, baseline: str, comparison: str) -> pd.DataFrame:
    """
    Relative gap Δ = (comparison − baseline)/baseline·100 at each SNR point.

    Args:
        summary (pd.DataFrame): Sweep summary with scheme, snr_db, mean_tput
        baseline (str): Scheme label of the reference
        comparison (str): Scheme label compared against it

    Returns:
        pd.DataFrame: Columns snr_db, baseline, comparison, delta_pct

    Raises:
        MissingSchemeError: If either scheme is missing at some SNR point
    """
    logger.info(f"Calculating gap of {comparison} over {baseline}")

    try:
        base = _curve(summary, baseline)
        snr_points = list(base.index)
        other = _curve(summary, comparison, snr_points)

        gaps = pd.DataFrame({
            'snr_db': snr_points,
            'baseline': base.to_numpy(),
            'comparison': other.to_numpy(),
        })
        gaps['delta_pct'] = (gaps['comparison'] - gaps['baseline']) / gaps['baseline'] * 100.0
        return gaps

    except Exception as e:
        logger.error(f"Error calculating gap table: {str(e)}")
        raise


def snr_gain_table(summary: pd.DataFrame, baseline: str, comparison: str) -> pd.DataFrame:
    """
    Horizontal distance between two throughput curves.

    For every SNR point of the comparison curve, the baseline curve is
    interpolated linearly to find the SNR at which it reaches the same
    throughput. Levels outside the baseline's range give NaN.

    Returns:
        pd.DataFrame: Columns snr_db, comparison_tput, baseline_snr_db, gain_db
    """
    base = _curve(summary, baseline).sort_index()
    other = _curve(summary, comparison).sort_index()

    # np.interp needs increasing abscissae
    order = np.argsort(base.to_numpy(), kind='stable')
    levels = base.to_numpy()[order]
    snrs = base.index.to_numpy(dtype=float)[order]
    matched = np.interp(other.to_numpy(), levels, snrs, left=np.nan, right=np.nan)

    gains = pd.DataFrame({
        'snr_db': other.index.to_numpy(dtype=float),
        'comparison_tput': other.to_numpy(),
        'baseline_snr_db': matched,
    })
    gains['gain_db'] = gains['baseline_snr_db'] - gains['snr_db']
    return gains


def build_table(summary: pd.DataFrame, reference: str,
                equal_snr: str = 'opposite_phase', sdr: str = 'maxmin_sdr',
                pnc_equal_snr: str = 'pnc_phase_aligned', pnc_sdr: str = 'pnc_maxmin_sdr',
                layout: str = 'full') -> pd.DataFrame:
    """
    Worst-station throughput table with Δ columns.

    The maxmin columns are compared with the equal-SNR column and the
    network-coded maxmin column with the network-coded equal-SNR column.

    Args:
        summary (pd.DataFrame): Sweep summary
        reference (str): Scheme used as the maxmin reference column
        layout (str): 'full' for TABLE_COLUMNS, 'compact' for the zero-forcing
            part only (COMPACT_TABLE_COLUMNS); compact needs no network-coded schemes

    Returns:
        pd.DataFrame: One row per SNR point
    """
    if layout not in TABLE_LAYOUTS:
        raise ConfigError(f"Table layout must be one of {list(TABLE_LAYOUTS)}, got '{layout}'")
    logger.info(f"Building {layout} throughput table with reference '{reference}'")

    reference_gap = gap_table(summary, equal_snr, reference)
    sdr_gap = gap_table(summary, equal_snr, sdr)
    table = pd.DataFrame({
        'snr_db': reference_gap['snr_db'],
        'opposite_phase': reference_gap['baseline'],
        'maxmin_reference': reference_gap['comparison'],
        'maxmin_reference_delta_pct': reference_gap['delta_pct'],
        'maxmin_sdr': sdr_gap['comparison'],
        'maxmin_sdr_delta_pct': sdr_gap['delta_pct'],
    })
    if layout == 'compact':
        return table[COMPACT_TABLE_COLUMNS]

    pnc_gap = gap_table(summary, pnc_equal_snr, pnc_sdr)
    table['pnc_phase_aligned'] = pnc_gap['baseline'].to_numpy()
    table['pnc_maxmin_sdr'] = pnc_gap['comparison'].to_numpy()
    table['pnc_maxmin_sdr_delta_pct'] = pnc_gap['delta_pct'].to_numpy()
    return table[TABLE_COLUMNS]
