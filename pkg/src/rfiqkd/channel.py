"""Threshold-detector Poisson channel with a rotating X/Y reference frame.

Everything here is an expected value: no sampling, no randomness.  Gains are
Poisson averages of the n-photon yield ``Y_n = 1 - (1 - y0)(1 - t)^n``, and
error-gains assume dark counts land on a random bit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .params import ProtocolParams

DARK_COUNT_ERROR = 0.5


@dataclass(frozen=True)
class ChannelParams:
    """Physical scenario.

    Attributes:
        eta: detector efficiency, in (0, 1].
        y0: dark-count probability per pulse, in [0, 1).
        ed: probability a photon hits the wrong detector, in [0, 0.5).
        alpha: fibre loss in dB/km.
        beta: X/Y frame rotation in degrees.
    """

    eta: float = 0.145
    y0: float = 3.0e-6
    ed: float = 0.015
    alpha: float = 0.2
    beta: float = 0.0

    def __post_init__(self):
        for name in ("eta", "y0", "ed", "alpha", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0.0 <= self.y0 < 1.0:
            raise ConfigError(f"y0 must lie in [0, 1), got {self.y0}")
        if not 0.0 <= self.ed < 0.5:
            raise ConfigError(f"ed must lie in [0, 0.5), got {self.ed}")
        if self.alpha < 0.0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def beta_normalized(self) -> float:
        """Rotation folded into [0, 90] degrees.

        Only ``|cos|`` and ``|sin|`` of the rotation matter up to relabelling
        of bit values, so angles are reduced mod 180 and reflected.
        """
        b = math.fmod(self.beta, 180.0)
        if b < 0.0:
            b += 180.0
        if b > 90.0:
            b = 180.0 - b
        return b

    @property
    def beta_rad(self) -> float:
        return math.radians(self.beta_normalized)


class BasisPair(enum.Enum):
    """(Alice preparation basis, Bob measurement basis)."""

    ZZ = "ZZ"
    XX = "XX"
    XY = "XY"
    YX = "YX"
    YY = "YY"

    @property
    def alice(self) -> str:
        return self.value[0]

    @property
    def bob(self) -> str:
        return self.value[1]


XY_PAIRS = (BasisPair.XX, BasisPair.XY, BasisPair.YX, BasisPair.YY)
INTENSITIES = ("mu", "nu")


@dataclass(frozen=True)
class ObservedStatistics:
    """Expected gains ``q[intensity][pair]``, error-gains ``eq[...]`` and vacuum gain."""

    q: dict = field(default_factory=dict)
    eq: dict = field(default_factory=dict)
    q0: float = 0.0


def transmittance(params: ChannelParams, distance: float) -> float:
    """Overall channel-plus-detector transmittance ``eta * 10^(-alpha L / 10)``."""
    if distance < 0:
        raise ConfigError(f"distance must be >= 0, got {distance}")
    return params.eta * 10.0 ** (-params.alpha * distance / 10.0)


def n_photon_yield(params: ChannelParams, t: float, n: int) -> float:
    if n < 0:
        raise ConfigError(f"photon number must be >= 0, got {n}")
    if not 0.0 <= t <= 1.0:
        raise ConfigError(f"transmittance must lie in [0, 1], got {t}")
    return 1.0 - (1.0 - params.y0) * (1.0 - t) ** n


def correlation(params: ChannelParams, pair: BasisPair, bb84: bool = False) -> float:
    """Signed correlator of the ideal single-photon channel for a basis pair.

    In BB84 mode the Z basis is assumed to drift like X (``cos beta``).
    """
    b = params.beta_rad
    if pair is BasisPair.ZZ:
        return math.cos(b) if bb84 else 1.0
    if pair is BasisPair.XX or pair is BasisPair.YY:
        return math.cos(b)
    if pair is BasisPair.XY:
        return math.sin(b)
    return -math.sin(b)


def single_photon_error(params: ChannelParams, pair: BasisPair, bb84: bool = False) -> float:
    kappa = correlation(params, pair, bb84)
    return (1.0 - (1.0 - 2.0 * params.ed) * kappa) / 2.0


def _click_fraction(params: ChannelParams, intensity: float, distance: float) -> float:
    # 1 - exp(-t*intensity) without cancellation at small t*intensity
    if intensity < 0:
        raise ConfigError(f"intensity must be >= 0, got {intensity}")
    return -math.expm1(-transmittance(params, distance) * intensity)


def observed_gain(params: ChannelParams, intensity: float, distance: float) -> float:
    """Poisson-averaged detection probability ``1 - (1 - y0) exp(-t * intensity)``."""
    return params.y0 + (1.0 - params.y0) * _click_fraction(params, intensity, distance)


def observed_error_gain(params: ChannelParams, intensity: float, pair: BasisPair,
                        distance: float, bb84: bool = False) -> float:
    signal = _click_fraction(params, intensity, distance)
    eq = DARK_COUNT_ERROR * params.y0 + single_photon_error(params, pair, bb84) * signal
    # can only bind for error rates near 1 (beta near 90 deg with ed < y0)
    return min(eq, params.y0 + (1.0 - params.y0) * signal)


def simulate_observations(params: ChannelParams, protocol: ProtocolParams, distance: float,
                          bb84: bool = False) -> ObservedStatistics:
    """Expected gains and error-gains for both intensities and all five basis pairs."""
    if distance < 0:
        raise ConfigError(f"distance must be >= 0, got {distance}")
    q: dict = {}
    eq: dict = {}
    for label, intensity in (("mu", protocol.mu), ("nu", protocol.nu)):
        gain = observed_gain(params, intensity, distance)
        q[label] = {pair: gain for pair in BasisPair}
        eq[label] = {pair: observed_error_gain(params, intensity, pair, distance, bb84)
                     for pair in BasisPair}
    return ObservedStatistics(q=q, eq=eq, q0=params.y0)
