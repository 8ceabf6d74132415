"""Protocol decision variables and their feasibility region."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

FEASIBILITY_MARGIN = 1e-6
MU_MAX = 1.0

PARAM_NAMES = (
    "mu", "nu",
    "p_mu", "p_nu",
    "p_za_mu", "p_xa_mu",
    "p_za_nu", "p_xa_nu",
    "p_zb", "p_xb",
)


@dataclass(frozen=True)
class ProtocolParams:
    """The ten optimizable protocol variables.

    Y-basis probabilities are the remainders ``1 - p_z - p_x``; the vacuum
    probability is ``1 - p_mu - p_nu``.  For BB84 runs the Y remainders are
    zero, i.e. ``p_x = 1 - p_z`` for Alice (both intensities) and Bob.
    """

    mu: float
    nu: float
    p_mu: float
    p_nu: float
    p_za_mu: float
    p_xa_mu: float
    p_za_nu: float
    p_xa_nu: float
    p_zb: float
    p_xb: float

    @property
    def p_vacuum(self) -> float:
        return 1.0 - self.p_mu - self.p_nu

    @property
    def p_ya_mu(self) -> float:
        return 1.0 - self.p_za_mu - self.p_xa_mu

    @property
    def p_ya_nu(self) -> float:
        return 1.0 - self.p_za_nu - self.p_xa_nu

    @property
    def p_yb(self) -> float:
        return 1.0 - self.p_zb - self.p_xb

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, x) -> "ProtocolParams":
        return cls(*(float(v) for v in x))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def unbiased(cls, mu: float = 0.5, nu: float = 0.1) -> "ProtocolParams":
        third = 1.0 / 3.0
        return cls(mu, nu, third, third, third, third, third, third, third, third)

    @classmethod
    def bb84(cls, mu, nu, p_mu, p_nu, p_za_mu, p_za_nu, p_zb) -> "ProtocolParams":
        """Z/X-only parameter set (no Y basis)."""
        return cls(mu, nu, p_mu, p_nu,
                   p_za_mu, 1.0 - p_za_mu,
                   p_za_nu, 1.0 - p_za_nu,
                   p_zb, 1.0 - p_zb)


def is_feasible(params: ProtocolParams, bb84: bool = False) -> bool:
    """Check the intensity ordering and probability-simplex constraints.

    Strict inequalities are enforced with a margin of ``FEASIBILITY_MARGIN``.
    With ``bb84=True`` the X probabilities must be exactly ``1 - p_z``.
    """
    m = FEASIBILITY_MARGIN
    x = params.as_array()
    if not np.all(np.isfinite(x)):
        return False
    if not (params.nu >= m and params.mu - params.nu >= m and params.mu <= MU_MAX):
        return False
    if not (params.p_mu >= m and params.p_nu >= m and params.p_vacuum >= m):
        return False
    pairs = (
        (params.p_za_mu, params.p_xa_mu),
        (params.p_za_nu, params.p_xa_nu),
        (params.p_zb, params.p_xb),
    )
    for pz, px in pairs:
        if pz < m or px < m:
            return False
        if bb84:
            if abs(pz + px - 1.0) > 1e-12:
                return False
        elif 1.0 - pz - px < m:
            return False
    return True
