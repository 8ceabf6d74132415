"""Gaussian-style finite-size fluctuation bounds on expected observables.

Each bound has the relative form ``x * (1 +/- gamma / sqrt(n_eff * x))`` where
``n_eff`` is the expected number of pulses in which the observable was
sampled.  Lower bounds are clamped at 0 and upper bounds capped at 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DegenerateSelectionError, NoVacuumError, ZeroObservationError

DEFAULT_N_PULSES = 1e11
DEFAULT_GAMMA = 5.0


@dataclass(frozen=True)
class FluctuationConfig:
    """Total pulse count ``N`` and confidence width ``gamma`` (0 = asymptotic)."""

    n_pulses: float = DEFAULT_N_PULSES
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not (math.isfinite(self.n_pulses) and self.n_pulses >= 1):
            raise ConfigError(f"n_pulses must be >= 1, got {self.n_pulses}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class BoundedValue:
    central: float
    lower: float
    upper: float


def effective_count(config: FluctuationConfig, selection_prob: float) -> float:
    if selection_prob <= 0.0:
        raise DegenerateSelectionError("observable has zero selection probability")
    if selection_prob > 1.0:
        raise ConfigError(f"selection probability must be <= 1, got {selection_prob}")
    return config.n_pulses * selection_prob


def _relative_width(x: float, n_eff: float, gamma: float) -> float:
    if gamma == 0.0:
        return 0.0
    if x <= 0.0:
        raise ZeroObservationError("relative fluctuation undefined for a zero observable")
    if n_eff <= 0.0:
        raise DegenerateSelectionError("effective count must be positive")
    return gamma / math.sqrt(n_eff * x)


def gain_upper(q: float, n_eff: float, gamma: float) -> float:
    return min(q * (1.0 + _relative_width(q, n_eff, gamma)), 1.0)


def gain_lower(q: float, n_eff: float, gamma: float) -> float:
    return max(q * (1.0 - _relative_width(q, n_eff, gamma)), 0.0)


def error_gain_upper(eq: float, n_eff: float, gamma: float) -> float:
    """Upper bound on the error-gain product ``E*Q``; same form as :func:`gain_upper`."""
    return gain_upper(eq, n_eff, gamma)


def vacuum_bounds(q0: float, config: FluctuationConfig, p_vacuum: float) -> BoundedValue:
    """Lower and upper bounds on the vacuum gain from ``N (1 - P_mu - P_nu)`` pulses.

    An exactly zero vacuum gain (no dark counts) has nothing to fluctuate and
    is returned as a zero-width bound.
    """
    if p_vacuum <= 0.0:
        raise NoVacuumError(f"vacuum probability must be positive, got {p_vacuum}")
    n_eff = effective_count(config, p_vacuum)
    if q0 == 0.0:
        return BoundedValue(0.0, 0.0, 0.0)
    return BoundedValue(
        central=q0,
        lower=gain_lower(q0, n_eff, config.gamma),
        upper=gain_upper(q0, n_eff, config.gamma),
    )
