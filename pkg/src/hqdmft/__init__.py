"""Two-site dynamical mean-field theory with a simulated quantum impurity solver."""
from .config import RunConfig, parse_config
from .dmft import DmftConfig, DmftTrace, SaturationEstimate, cost, dmft_iterate, evaluate_f, saturation_estimate
from .estimator import DMFTSolver
from .exceptions import ConfigError, DegeneracyError, DimensionError
from .model import SiamParams

__all__ = [
    "ConfigError",
    "DMFTSolver",
    "DegeneracyError",
    "DimensionError",
    "DmftConfig",
    "DmftTrace",
    "RunConfig",
    "SaturationEstimate",
    "SiamParams",
    "cost",
    "dmft_iterate",
    "evaluate_f",
    "parse_config",
    "saturation_estimate",
]
__version__ = "0.1.0"
