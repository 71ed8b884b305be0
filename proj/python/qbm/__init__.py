"""Quantum Brownian motion with position and momentum coupling to a thermal bath."""

from ._qbm import (
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    RecurrenceError,
    SingularityError,
    SpectralDensityParams,
    dissipation_kernel,
    effective_mass,
    markov_limit,
    noise_kernel,
    oracle,
    renormalized_frequency,
    simulate,
    spectral_density,
)

__all__ = [
    "CalibrationError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "RecurrenceError",
    "SingularityError",
    "SpectralDensityParams",
    "dissipation_kernel",
    "effective_mass",
    "markov_limit",
    "noise_kernel",
    "oracle",
    "renormalized_frequency",
    "simulate",
    "spectral_density",
]
