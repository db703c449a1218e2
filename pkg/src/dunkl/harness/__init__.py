"""Verification suites, configuration and the command line interface."""
from .config import Config, ConfigError, config_from_dict, load_config
from .report import Check, Report
from .suites import (
    SUITES,
    suite_identities,
    suite_numeric,
    suite_positivity_vk,
    suite_semigroup_positivity,
)

__all__ = [
    "SUITES",
    "Check",
    "Config",
    "ConfigError",
    "Report",
    "config_from_dict",
    "load_config",
    "suite_identities",
    "suite_numeric",
    "suite_positivity_vk",
    "suite_semigroup_positivity",
]
