"""Key-rate kernel selection.

The compiled extension ``_ckernel`` is used when it was built; otherwise the
pure-Python ``_pykernel`` is used.  Set ``RFIQKD_KERNEL=python`` to force the
fallback (``compiled`` forces the extension and fails loudly if missing).

Argument layout shared by both backends::

    x    = [mu, nu, p_mu, p_nu, p_za_mu, p_xa_mu, p_za_nu, p_xa_nu, p_zb, p_xb]
    scen = [eta, y0, ed, alpha, beta_rad, distance_km, n_pulses, gamma, f]
    out  = [raw_rate, rate, C, phi, varphi, I_E, Y1_ZZ^L, Q_mu_ZZ, E_mu_ZZ,
            prefactor, e1_ZZ, e1_XX, e1_XY, e1_YX, e1_YY, unused]
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernel
from ._pykernel import (  # noqa: F401
    MODE_BB84,
    MODE_RFI_IE,
    MODE_RFI_LITERAL,
    OUT_SIZE,
    STATUS_DEGENERATE,
    STATUS_INCONSISTENT,
    STATUS_INFEASIBLE,
    STATUS_KEY,
    STATUS_NO_KEY,
    STATUS_ZERO_OBSERVATION,
)

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

_choice = os.environ.get("RFIQKD_KERNEL", "auto").lower()
if _choice == "python" or (_choice == "auto" and _ckernel is None):
    BACKEND = "python"
    _evaluate = _pykernel.evaluate
elif _ckernel is None:
    raise ImportError("RFIQKD_KERNEL=compiled but rfiqkd._ckernel is not built")
else:
    BACKEND = "compiled"
    _evaluate = _ckernel.evaluate


def evaluate(x: np.ndarray, scen: np.ndarray, mode: int, out: np.ndarray) -> int:
    """Evaluate the pipeline with the selected backend; arrays must be float64 and contiguous."""
    return _evaluate(x, scen, mode, out)


def backends() -> dict:
    """All importable backends by name, for benchmarking and cross-checks."""
    found = {"python": _pykernel.evaluate}
    if _ckernel is not None:
        found["compiled"] = _ckernel.evaluate
    return found


def new_out() -> np.ndarray:
    return np.zeros(OUT_SIZE)
