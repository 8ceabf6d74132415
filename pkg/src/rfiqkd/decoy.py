"""Three-intensity (signal, weak decoy, vacuum) analytic decoy-state bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .channel import BasisPair, ObservedStatistics
from .errors import IntensityOrderingError, UndefinedErrorRateError
from .params import ProtocolParams
from .statistics import (
    FluctuationConfig,
    effective_count,
    error_gain_upper,
    gain_lower,
    gain_upper,
    vacuum_bounds,
)

E1_MAX = 0.5
BB84_PAIRS = (BasisPair.ZZ, BasisPair.XX)


@dataclass(frozen=True)
class SinglePhotonBounds:
    """Single-photon yield lower bound (ZZ) and per-pair error-rate upper bounds.

    ``y1_lower_by_pair`` keeps the yield bound each pair's error estimate was
    normalized by.
    """

    y1_zz_lower: float
    e1_upper: dict
    y1_lower_by_pair: dict = field(default_factory=dict)


def y1_lower(mu: float, nu: float, q_mu_upper: float, q_nu_lower: float,
             q0_upper: float) -> float:
    """Lower bound on the single-photon yield, clamped to [0, 1]."""
    if not 0.0 < nu < mu:
        raise IntensityOrderingError(f"need 0 < nu < mu, got mu={mu}, nu={nu}")
    mu2, nu2 = mu * mu, nu * nu
    bracket = (q_nu_lower * math.exp(nu)
               - q_mu_upper * math.exp(mu) * nu2 / mu2
               - (mu2 - nu2) / mu2 * q0_upper)
    y1 = mu / (mu * nu - nu2) * bracket
    return min(max(y1, 0.0), 1.0)


def e1_upper(nu: float, eq_nu_upper: float, q0_lower: float, y1_lower: float) -> float:
    """Upper bound on the single-photon error rate, clamped to [0, 0.5]."""
    if nu <= 0.0:
        raise IntensityOrderingError(f"decoy intensity must be positive, got {nu}")
    if y1_lower <= 0.0:
        raise UndefinedErrorRateError("single-photon yield bound is zero")
    e1 = (eq_nu_upper * math.exp(nu) - 0.5 * q0_lower) / (nu * y1_lower)
    return min(max(e1, 0.0), E1_MAX)


def _alice_prob(protocol: ProtocolParams, basis: str, intensity: str) -> float:
    if intensity == "mu":
        pz, px, py = protocol.p_za_mu, protocol.p_xa_mu, protocol.p_ya_mu
    else:
        pz, px, py = protocol.p_za_nu, protocol.p_xa_nu, protocol.p_ya_nu
    return {"Z": pz, "X": px, "Y": py}[basis]


def _bob_prob(protocol: ProtocolParams, basis: str) -> float:
    return {"Z": protocol.p_zb, "X": protocol.p_xb, "Y": protocol.p_yb}[basis]


def selection_probability(protocol: ProtocolParams, pair: BasisPair, intensity: str) -> float:
    """Probability a pulse carries ``intensity`` and lands in basis ``pair``."""
    p_int = protocol.p_mu if intensity == "mu" else protocol.p_nu
    return p_int * _alice_prob(protocol, pair.alice, intensity) * _bob_prob(protocol, pair.bob)


def estimate_all(stats: ObservedStatistics, protocol: ProtocolParams,
                 config: FluctuationConfig, pairs=None, bb84: bool = False) -> SinglePhotonBounds:
    """Fluctuation-bounded decoy estimates for every requested basis pair.

    Each pair uses its own signal/decoy statistics for the yield bound; the
    vacuum gain is shared.  A pair whose yield bound collapses to zero gets
    the uninformative error bound 0.5.
    """
    if pairs is None:
        pairs = BB84_PAIRS if bb84 else tuple(BasisPair)
    gamma = config.gamma
    vac = vacuum_bounds(stats.q0, config, protocol.p_vacuum)

    y1_by_pair = {}
    e1 = {}
    for pair in pairs:
        n_mu = effective_count(config, selection_probability(protocol, pair, "mu"))
        n_nu = effective_count(config, selection_probability(protocol, pair, "nu"))
        q_mu_u = gain_upper(stats.q["mu"][pair], n_mu, gamma)
        q_nu_l = gain_lower(stats.q["nu"][pair], n_nu, gamma)
        y1 = y1_lower(protocol.mu, protocol.nu, q_mu_u, q_nu_l, vac.upper)
        y1_by_pair[pair] = y1
        if y1 <= 0.0:
            e1[pair] = E1_MAX
            continue
        eq_nu_u = error_gain_upper(stats.eq["nu"][pair], n_nu, gamma)
        e1[pair] = e1_upper(protocol.nu, eq_nu_u, vac.lower, y1)

    return SinglePhotonBounds(
        y1_zz_lower=y1_by_pair.get(BasisPair.ZZ, 0.0),
        e1_upper=e1,
        y1_lower_by_pair=y1_by_pair,
    )
