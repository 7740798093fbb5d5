"""Qubit relaxation in a bath of two-level systems.

Frequencies and couplings are angular (rad/s), rates are 1/s and densities
are per rad/s, except where a function name or argument says otherwise.
"""

from ._core import (
    ArgumentError,
    ConfigError,
    DomainError,
    FitError,
    NumericError,
    ParseError,
    __version__,
    comb_lifetime,
    comb_sum_closed_form,
    fermi_rate,
    fit,
    frequency_model,
    holeburn,
    lifetime_map,
    purcell_rate,
    regime_classify,
    run_cli,
    serialize_config,
    simulate_decay,
    validate_config,
)

__all__ = [
    "ArgumentError",
    "ConfigError",
    "DomainError",
    "FitError",
    "NumericError",
    "ParseError",
    "__version__",
    "comb_lifetime",
    "comb_sum_closed_form",
    "fermi_rate",
    "fit",
    "frequency_model",
    "holeburn",
    "lifetime_map",
    "purcell_rate",
    "regime_classify",
    "run_cli",
    "serialize_config",
    "simulate_decay",
    "validate_config",
]
