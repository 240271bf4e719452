"""Solutions of the general Heun equation in Klein's symmetric form."""
from .errors import ConfigError, HeunError, NumericalError
from .fuchsian import (FuchsianConfig, SymmetricHeunConfig, canonical_points,
                       elementary_symmetric, rho_functions)
from .mobius import MobiusMap, canonicalize, cross_ratio, transform_config
from .series import (Family, eval_series, fundamental_pair, invert_config,
                     laurent_pair, series_coeffs)

__all__ = [
    "ConfigError", "HeunError", "NumericalError",
    "FuchsianConfig", "SymmetricHeunConfig", "canonical_points", "elementary_symmetric",
    "rho_functions", "MobiusMap", "canonicalize", "cross_ratio", "transform_config",
    "Family", "eval_series", "fundamental_pair", "invert_config", "laurent_pair",
    "series_coeffs",
]
