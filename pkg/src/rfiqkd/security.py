"""RFI security quantities (C, phi, phi', I_E) and GLLP-style key rates.

Two RFI privacy terms are available.  ``RFI_IE`` (default) charges privacy
amplification with Eve's information ``I_E`` derived from the rotation
invariant ``C``; ``RFI_LITERAL_EQ13`` charges ``H(e1_ZZ)`` as in the plain
BB84-style formula, which ignores ``C`` altogether.  ``BB84`` charges
``H(e1_XX)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .channel import XY_PAIRS, BasisPair, ObservedStatistics
from .decoy import SinglePhotonBounds
from .errors import ConfigError, IncompleteBoundsError, InconsistencyError
from .params import ProtocolParams

DEFAULT_F = 1.16
_IDENTITY_TOL = 1e-12


class SecurityMode(enum.Enum):
    RFI_IE = "rfi-ie"
    RFI_LITERAL_EQ13 = "rfi-literal"
    BB84 = "bb84"

    @classmethod
    def parse(cls, text: str) -> "SecurityMode":
        key = text.strip().lower().replace("_", "-")
        aliases = {"rfi-literal-eq13": "rfi-literal"}
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise ConfigError(f"unknown security mode {text!r}")


@dataclass(frozen=True)
class SecurityConfig:
    f: float = DEFAULT_F
    mode: SecurityMode = SecurityMode.RFI_IE

    def __post_init__(self):
        if not (math.isfinite(self.f) and self.f >= 1.0):
            raise ConfigError(f"reconciliation efficiency f must be >= 1, got {self.f}")


@dataclass(frozen=True)
class KeyRateReport:
    """Final key rate plus every intermediate that produced it.

    ``rate`` is clamped at zero; ``raw_rate`` keeps the sign.  For BB84 the
    C/phi/varphi fields are NaN and ``i_e`` holds ``H(e1_XX)``.
    """

    rate: float
    raw_rate: float
    no_key: bool
    c_value: float
    phi: float
    varphi: float
    i_e: float
    y1_zz_lower: float
    e1_zz_upper: float
    q_mu_zz: float
    e_mu_zz: float
    prefactor: float
    mode: SecurityMode


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def compute_c(bounds) -> float:
    """Sum of squared correlators ``(1 - 2 e)^2`` over XX, XY, YX, YY.

    Accepts a :class:`SinglePhotonBounds` or a plain ``{pair: e1}`` mapping.
    """
    e1 = bounds.e1_upper if isinstance(bounds, SinglePhotonBounds) else bounds
    missing = [p.value for p in XY_PAIRS if p not in e1]
    if missing:
        raise IncompleteBoundsError(f"missing error bounds for {', '.join(missing)}")
    return sum((1.0 - 2.0 * e1[p]) ** 2 for p in XY_PAIRS)


def phase_terms(e1_zz: float, c_value: float):
    """Return ``(phi, varphi)`` for a ZZ error bound and a C value."""
    if not 0.0 <= e1_zz <= 0.5:
        raise ValueError(f"e1_zz must lie in [0, 0.5], got {e1_zz}")
    if not 0.0 <= c_value <= 4.0 + _IDENTITY_TOL:
        raise ValueError(f"C must lie in [0, 4], got {c_value}")
    half_c = c_value / 2.0
    phi = min(math.sqrt(half_c) / (1.0 - e1_zz), 1.0)
    residual = half_c - (1.0 - e1_zz) ** 2 * phi ** 2
    if residual < -_IDENTITY_TOL:
        raise InconsistencyError(f"negative phase residual {residual!r}")
    if phi < 1.0 or e1_zz == 0.0 or residual <= 0.0:
        return phi, 0.0
    return phi, min(math.sqrt(residual) / e1_zz, 1.0)


def eve_information(e1_zz: float, c_value: float) -> float:
    phi, varphi = phase_terms(e1_zz, c_value)
    return ((1.0 - e1_zz) * binary_entropy((1.0 + phi) / 2.0)
            + e1_zz * binary_entropy((1.0 + varphi) / 2.0))


def _sifted_terms(protocol: ProtocolParams, stats: ObservedStatistics):
    prefactor = protocol.p_mu * protocol.p_za_mu * protocol.p_zb
    q = stats.q["mu"][BasisPair.ZZ]
    e = stats.eq["mu"][BasisPair.ZZ] / q if q > 0.0 else 0.0
    return prefactor, q, min(max(e, 0.0), 1.0)


def _finish(prefactor, f, q, e, mu, y1, privacy, **fields) -> KeyRateReport:
    raw = prefactor * (-f * q * binary_entropy(e) + mu * math.exp(-mu) * y1 * privacy)
    no_key = not raw > 0.0 or y1 <= 0.0
    return KeyRateReport(
        rate=0.0 if no_key else raw,
        raw_rate=raw,
        no_key=no_key,
        y1_zz_lower=y1,
        q_mu_zz=q,
        e_mu_zz=e,
        prefactor=prefactor,
        **fields,
    )


def rfi_key_rate(protocol: ProtocolParams, stats: ObservedStatistics,
                 bounds: SinglePhotonBounds, sec: SecurityConfig) -> KeyRateReport:
    if sec.mode is SecurityMode.BB84:
        raise ConfigError("rfi_key_rate called with BB84 security mode")
    prefactor, q, e = _sifted_terms(protocol, stats)
    e1_zz = bounds.e1_upper[BasisPair.ZZ]
    c_value = compute_c(bounds)
    phi, varphi = phase_terms(e1_zz, c_value)
    i_e = ((1.0 - e1_zz) * binary_entropy((1.0 + phi) / 2.0)
           + e1_zz * binary_entropy((1.0 + varphi) / 2.0))
    if sec.mode is SecurityMode.RFI_IE:
        privacy = 1.0 - i_e
    else:
        privacy = 1.0 - binary_entropy(e1_zz)
    return _finish(prefactor, sec.f, q, e, protocol.mu, bounds.y1_zz_lower, privacy,
                   c_value=c_value, phi=phi, varphi=varphi, i_e=i_e,
                   e1_zz_upper=e1_zz, mode=sec.mode)


def bb84_key_rate(protocol: ProtocolParams, stats: ObservedStatistics,
                  bounds: SinglePhotonBounds, sec: SecurityConfig) -> KeyRateReport:
    """GLLP rate keyed on Z with phase error estimated from the XX pair."""
    if BasisPair.XX not in bounds.e1_upper:
        raise IncompleteBoundsError("BB84 rate needs the XX error bound")
    prefactor, q, e = _sifted_terms(protocol, stats)
    h_x = binary_entropy(bounds.e1_upper[BasisPair.XX])
    nan = float("nan")
    return _finish(prefactor, sec.f, q, e, protocol.mu, bounds.y1_zz_lower, 1.0 - h_x,
                   c_value=nan, phi=nan, varphi=nan, i_e=h_x,
                   e1_zz_upper=bounds.e1_upper[BasisPair.ZZ], mode=SecurityMode.BB84)


def key_rate(protocol, stats, bounds, sec: SecurityConfig) -> KeyRateReport:
    if sec.mode is SecurityMode.BB84:
        return bb84_key_rate(protocol, stats, bounds, sec)
    return rfi_key_rate(protocol, stats, bounds, sec)
