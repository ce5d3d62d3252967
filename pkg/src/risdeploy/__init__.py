"""RIS rotation and placement planning over cascade Rician fading."""

__version__ = "0.1.0"

from .geometry import AngleSet, DomainError, SceneGeometry, elevation_angles, feasible_interval, link_distances
from .specfun import LOS, RicianSpec, bessel_i0, gamma_factor, kummer_3half_1, omega
from .radiometrics import PatternConfig, composite_gain, directivity_factor, power_pattern
from .fading import LinkBudget, capacity_upper_bound, expected_snr, mc_ergodic_capacity, sample_cascade
from .deployment import effective_region, optimal_ris_rotation, optimize_location
from .config import ConfigError, RunConfig, load_config

__all__ = [
    "AngleSet", "DomainError", "SceneGeometry", "elevation_angles", "feasible_interval", "link_distances",
    "LOS", "RicianSpec", "bessel_i0", "gamma_factor", "kummer_3half_1", "omega",
    "PatternConfig", "composite_gain", "directivity_factor", "power_pattern",
    "LinkBudget", "capacity_upper_bound", "expected_snr", "mc_ergodic_capacity", "sample_cascade",
    "effective_region", "optimal_ris_rotation", "optimize_location",
    "ConfigError", "RunConfig", "load_config",
]
