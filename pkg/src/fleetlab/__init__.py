"""fleetlab: a deterministic weather-driven taxi fleet laboratory.

Generates synthetic fleet operations under three decision policies, then
reproduces the headline productivity comparison, weather correlation matrix,
component decomposition, a five-method causal estimation suite, and the ROI
economics report.
"""

from .config import ConfigError, SimConfig, config_from_dict, config_hash, load_config

__version__ = "0.1.0"

__all__ = [
    "SimConfig",
    "ConfigError",
    "load_config",
    "config_from_dict",
    "config_hash",
    "__version__",
]
