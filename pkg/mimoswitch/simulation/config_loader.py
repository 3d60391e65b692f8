"""
config_loader.py

Loading of declarative experiment files. A config file is a JSON object with
optional sections:

    {
      "simulation":   {"n": 4, "pattern": "pairwise", "snr_db": [0, 10, 20, 30],
                       "channels": 2000, "schemes": ["opposite_phase", "maxmin_sdr"],
                       "seed": 0, "cond_cap": 1e12, "threads": 4, "p": 1.0},
      "phase_search": {"bins": 8, "trials": 10, "b_grid": [-2, ..., 2], "per_element_phase": false},
      "eps_search":   {"expansion": 2.0, "initial_step": 1e-9, "tolerance": 1e-14, "max_iterations": 200},
      "sdr":          {"samples": 1000, "eps_tolerance": 1e-5, "max_outer_iterations": 80,
                       "sdp_max_iterations": 200, "sdp_tolerance": 1e-9},
      "iterative":    {"max_alternations": 20, "tolerance": 1e-4, "init": "auto", "initial_b": [[re, im], ...]},
      "exhaustive":   {"magnitude_points": 200, "phase_points": 64},
      "output":       {"dir": "output", "format": "csv", "gnuplot": true}
    }

Unknown sections or keys are rejected so typos do not pass silently.
"""

import dataclasses
import json
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional
import logging

from mimoswitch.errors import ConfigError
from mimoswitch.optimization.sdp import SdpSettings
from mimoswitch.simulation.sweep import SimConfig

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = 'MIMOSWITCH_OUTPUT_DIR'
FORMATS = ('csv', 'json')

SECTION_KEYS = {
    'simulation': {'n', 'pattern', 'snr_db', 'channels', 'schemes', 'seed', 'cond_cap', 'threads', 'p'},
    'phase_search': {'bins', 'trials', 'b_grid', 'per_element_phase'},
    'eps_search': {'expansion', 'initial_step', 'tolerance', 'max_iterations'},
    'sdr': {'samples', 'eps_tolerance', 'max_outer_iterations', 'sdp_max_iterations', 'sdp_tolerance'},
    'iterative': {'max_alternations', 'tolerance', 'init', 'initial_b'},
    'exhaustive': {'magnitude_points', 'phase_points'},
    'output': {'dir', 'format', 'gnuplot'},
}


@dataclass(frozen=True)
class OutputOptions:
    """Where and how results are written."""

    directory: str
    format: str = 'csv'
    gnuplot: bool = True

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got '{self.format}'")


def default_output_dir() -> str:
    """Output directory from MIMOSWITCH_OUTPUT_DIR, else 'output'."""
    return os.environ.get(OUTPUT_DIR_ENV) or 'output'


def validate_sections(raw: Dict[str, Any]) -> None:
    """
    Check section and key names.

    Raises:
        ConfigError: On an unknown section, an unknown key or a non-object section
    """
    if not isinstance(raw, dict):
        raise ConfigError("Config file must contain a JSON object")
    for section, values in raw.items():
        if section not in SECTION_KEYS:
            raise ConfigError(f"Unknown config section '{section}'. Valid sections: {sorted(SECTION_KEYS)}")
        if not isinstance(values, dict):
            raise ConfigError(f"Config section '{section}' must be an object")
        unknown = sorted(set(values) - SECTION_KEYS[section])
        if unknown:
            raise ConfigError(f"Unknown keys in section '{section}': {unknown}")


def load_config(file_path: str) -> Dict[str, Any]:
    """
    Load and check a JSON experiment file.

    Args:
        file_path (str): Path to the file

    Returns:
        Dict[str, Any]: The parsed sections

    Raises:
        FileNotFoundError: If the file does not exist
        json.JSONDecodeError: If the file is not valid JSON
        ConfigError: If a section or key is unknown
    """
    logger.info(f"Loading experiment config from {file_path}")

    if not os.path.exists(file_path):
        error_msg = f"Config file not found: {file_path}"
        logger.error(error_msg)
        raise FileNotFoundError(error_msg)

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
        validate_sections(raw)
        logger.info(f"Loaded config sections: {sorted(raw)}")
        return raw

    except Exception as e:
        logger.error(f"Error loading config: {str(e)}")
        raise


def _complex_vector(values) -> tuple:
    result = []
    for value in values:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValueError(f"complex entries must be [re, im], got {value}")
            result.append(complex(float(value[0]), float(value[1])))
        else:
            result.append(complex(float(value)))
    return tuple(result)


def build_sim_config(raw: Optional[Dict[str, Any]] = None, base: Optional[SimConfig] = None,
                     overrides: Optional[Dict[str, Any]] = None) -> SimConfig:
    """
    Combine defaults, a config file and command-line overrides into a SimConfig.

    Args:
        raw (Optional[Dict[str, Any]]): Parsed config sections
        base (Optional[SimConfig]): Starting point (a preset), defaults otherwise
        overrides (Optional[Dict[str, Any]]): Simulation keys from the command line;
            None values are ignored

    Returns:
        SimConfig: The effective configuration

    Raises:
        ConfigError: If a value has the wrong type or range
    """
    raw = raw or {}
    validate_sections(raw)
    cfg = base or SimConfig()
    settings = cfg.settings

    try:
        simulation = dict(raw.get('simulation', {}))
        simulation.update({k: v for k, v in (overrides or {}).items() if v is not None})
        renamed = {'snr_db': 'snr_points_db'}
        sim_fields = {renamed.get(k, k): v for k, v in simulation.items()}
        for key in ('snr_points_db', 'schemes'):
            if key in sim_fields:
                sim_fields[key] = tuple(sim_fields[key])

        phase = dict(raw.get('phase_search', {}))
        top = {}
        if 'b_grid' in phase:
            top['b_grid'] = tuple(float(x) for x in phase.pop('b_grid'))
        if 'per_element_phase' in phase:
            top['per_element_phase'] = bool(phase.pop('per_element_phase'))
        top.update(raw.get('exhaustive', {}))

        sdr = dict(raw.get('sdr', {}))
        sdp_fields = {}
        if 'sdp_max_iterations' in sdr:
            sdp_fields['max_iterations'] = int(sdr.pop('sdp_max_iterations'))
        if 'sdp_tolerance' in sdr:
            sdp_fields['tolerance'] = float(sdr.pop('sdp_tolerance'))
        sdr['sdp_settings'] = dataclasses.replace(settings.sdr.sdp_settings, **sdp_fields) \
            if sdp_fields else settings.sdr.sdp_settings

        iterative = dict(raw.get('iterative', {}))
        if iterative.get('initial_b') is not None:
            iterative['initial_b'] = _complex_vector(iterative['initial_b'])

        settings = dataclasses.replace(
            settings,
            phase_search=dataclasses.replace(settings.phase_search, **phase),
            eps_search=dataclasses.replace(settings.eps_search, **raw.get('eps_search', {})),
            sdr=dataclasses.replace(settings.sdr, **sdr),
            iterative=dataclasses.replace(settings.iterative, **iterative),
            **top,
        )
        return dataclasses.replace(cfg, settings=settings, **sim_fields)

    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid configuration value: {str(e)}") from e


def output_options(raw: Optional[Dict[str, Any]] = None, directory: Optional[str] = None,
                   fmt: Optional[str] = None) -> OutputOptions:
    """Output settings: command line first, then the file's output section, then defaults."""
    section = (raw or {}).get('output', {})
    return OutputOptions(
        directory=directory or section.get('dir') or default_output_dir(),
        format=fmt or section.get('format', 'csv'),
        gnuplot=bool(section.get('gnuplot', True)),
    )
