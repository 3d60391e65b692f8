"""
presets.py

Named experiments: the two throughput tables and the throughput-vs-SNR curve
sets for two and four stations.
"""

from dataclasses import dataclass
from typing import Dict, Optional

from mimoswitch.errors import ConfigError
from mimoswitch.simulation.sweep import SimConfig

TABLE_SNR_DB = (0.0, 10.0, 20.0, 30.0)
CURVE_SNR_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


@dataclass(frozen=True)
class Preset:
    """A named SimConfig; tables also name their maxmin reference scheme."""

    name: str
    description: str
    config: SimConfig
    table_reference: Optional[str] = None

    @property
    def is_table(self) -> bool:
        return self.table_reference is not None


_TABLE_SCHEMES = ('opposite_phase', 'maxmin_sdr', 'pnc_phase_aligned', 'pnc_maxmin_sdr')

PRESETS: Dict[str, Preset] = {preset.name: preset for preset in (
    Preset(
        'table1',
        'Two stations, pairwise: equal-SNR, exhaustive maxmin, SDR and network-coded columns',
        SimConfig(n=2, pattern='pairwise', snr_points_db=TABLE_SNR_DB, channels=20000,
                  schemes=_TABLE_SCHEMES[:1] + ('maxmin_exhaustive',) + _TABLE_SCHEMES[1:]),
        table_reference='maxmin_exhaustive',
    ),
    Preset(
        'table2',
        'Four stations, pairwise: equal-SNR, SDR bound, SDR and network-coded columns',
        SimConfig(n=4, pattern='pairwise', snr_points_db=TABLE_SNR_DB, channels=2000,
                  schemes=_TABLE_SCHEMES[:1] + ('sdr_upper',) + _TABLE_SCHEMES[1:]),
        table_reference='sdr_upper',
    ),
    Preset(
        'fig-two-station',
        'Two stations, pairwise: basic, equal-SNR and network-coded curves',
        SimConfig(n=2, pattern='pairwise', snr_points_db=CURVE_SNR_DB, channels=2000,
                  schemes=('basic', 'closed_form', 'random_phase', 'pnc_phase_aligned', 'pnc_identical_b')),
    ),
    Preset(
        'fig-four-station',
        'Four stations, pairwise: basic, opposite-phase, random-phase (L=10, 100) and network-coded curves',
        SimConfig(n=4, pattern='pairwise', snr_points_db=CURVE_SNR_DB, channels=2000,
                  schemes=('basic', 'opposite_phase', 'random_phase:trials=10', 'random_phase:trials=100',
                           'pnc_phase_aligned', 'pnc_identical_b')),
    ),
    Preset(
        'fig-non-pairwise',
        'Four stations, non-pairwise: basic, random-phase and identical-b curves for L=10 and 100',
        SimConfig(n=4, pattern='nonpairwise', snr_points_db=CURVE_SNR_DB, channels=2000,
                  schemes=('basic', 'random_phase:trials=10', 'random_phase:trials=100',
                           'pnc_identical_b:trials=10', 'pnc_identical_b:trials=100')),
    ),
    Preset(
        'fig-maxmin-non-pairwise',
        'Four stations, non-pairwise: basic, random-phase, SDR maxmin and network-coded SDR curves',
        SimConfig(n=4, pattern='nonpairwise', snr_points_db=CURVE_SNR_DB, channels=500,
                  schemes=('basic', 'random_phase', 'maxmin_sdr', 'pnc_maxmin_sdr')),
    ),
)}


def get_preset(name: str) -> Preset:
    """
    Look up a preset by name.

    Raises:
        ConfigError: If the name is unknown
    """
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset '{name}'. Valid presets: {', '.join(PRESETS)}")
    return PRESETS[name]
