"""Pure-Python key-rate kernel.

Flat-argument twin of ``_ckernel.pyx``; the two must stay line-for-line
equivalent.  See ``rfiqkd.kernel`` for the argument layout.
"""
import math

OUT_SIZE = 16

STATUS_KEY = 0
STATUS_NO_KEY = 1
STATUS_INFEASIBLE = -1
STATUS_DEGENERATE = -2
STATUS_ZERO_OBSERVATION = -3
STATUS_INCONSISTENT = -4

MODE_RFI_IE = 0
MODE_RFI_LITERAL = 1
MODE_BB84 = 2

_MARGIN = 1e-6
_MU_MAX = 1.0


def _h(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _feasible(x, bb84):
    mu, nu, p_mu, p_nu = x[0], x[1], x[2], x[3]
    for v in x:
        if not math.isfinite(v):
            return False
    if not (nu >= _MARGIN and mu - nu >= _MARGIN and mu <= _MU_MAX):
        return False
    if not (p_mu >= _MARGIN and p_nu >= _MARGIN and 1.0 - p_mu - p_nu >= _MARGIN):
        return False
    for k in (4, 6, 8):
        pz, px = x[k], x[k + 1]
        if pz < _MARGIN or px < _MARGIN:
            return False
        if bb84:
            if abs(pz + px - 1.0) > 1e-12:
                return False
        elif 1.0 - pz - px < _MARGIN:
            return False
    return True


def evaluate(x, scen, mode, out):
    """Run the full pipeline; write intermediates into ``out`` and return a status code."""
    eta, y0, ed, alpha, beta, dist, n_pulses, gamma, f = scen[:9]
    bb84 = mode == MODE_BB84
    for k in range(OUT_SIZE):
        out[k] = 0.0
    if not _feasible(x, bb84):
        out[0] = -math.inf
        return STATUS_INFEASIBLE

    mu, nu, p_mu, p_nu = x[0], x[1], x[2], x[3]
    pa_mu = (x[4], x[5], 1.0 - x[4] - x[5])  # Z, X, Y
    pa_nu = (x[6], x[7], 1.0 - x[6] - x[7])
    pb = (x[8], x[9], 1.0 - x[8] - x[9])
    p_vac = 1.0 - p_mu - p_nu

    t = eta * 10.0 ** (-alpha * dist / 10.0)
    click_mu = -math.expm1(-t * mu)
    click_nu = -math.expm1(-t * nu)
    q_mu = y0 + (1.0 - y0) * click_mu
    q_nu = y0 + (1.0 - y0) * click_nu

    # vacuum bounds
    if y0 == 0.0:
        q0_l = 0.0
        q0_u = 0.0
    elif gamma == 0.0:
        q0_l = y0
        q0_u = y0
    else:
        w = gamma / math.sqrt(n_pulses * p_vac * y0)
        q0_l = max(y0 * (1.0 - w), 0.0)
        q0_u = min(y0 * (1.0 + w), 1.0)

    cb = math.cos(beta)
    sb = math.sin(beta)
    vis = 1.0 - 2.0 * ed
    # pair order ZZ, XX, XY, YX, YY with (alice index, bob index, kappa)
    pairs = (
        (0, 0, cb if bb84 else 1.0),
        (1, 1, cb),
        (1, 2, sb),
        (2, 1, -sb),
        (2, 2, cb),
    )
    n_pairs = 2 if bb84 else 5
    e_nu = math.exp(nu)
    e_mu = math.exp(mu)
    mu2 = mu * mu
    nu2 = nu * nu
    y1_scale = mu / (mu * nu - nu2)
    y1_zz = 0.0
    for k in range(n_pairs):
        ia, ib, kappa = pairs[k]
        sel_mu = p_mu * pa_mu[ia] * pb[ib]
        sel_nu = p_nu * pa_nu[ia] * pb[ib]
        if sel_mu <= 0.0 or sel_nu <= 0.0:
            return STATUS_DEGENERATE
        e1_true = (1.0 - vis * kappa) / 2.0
        eq_nu = min(0.5 * y0 + e1_true * click_nu, q_nu)
        if gamma == 0.0:
            q_mu_u = q_mu
            q_nu_l = q_nu
            eq_nu_u = eq_nu
        else:
            if eq_nu <= 0.0 or q_nu <= 0.0 or q_mu <= 0.0:
                return STATUS_ZERO_OBSERVATION
            n_mu = n_pulses * sel_mu
            n_nu = n_pulses * sel_nu
            q_mu_u = min(q_mu * (1.0 + gamma / math.sqrt(n_mu * q_mu)), 1.0)
            q_nu_l = max(q_nu * (1.0 - gamma / math.sqrt(n_nu * q_nu)), 0.0)
            eq_nu_u = min(eq_nu * (1.0 + gamma / math.sqrt(n_nu * eq_nu)), 1.0)
        y1 = y1_scale * (q_nu_l * e_nu - q_mu_u * e_mu * nu2 / mu2 - (mu2 - nu2) / mu2 * q0_u)
        y1 = min(max(y1, 0.0), 1.0)
        if k == 0:
            y1_zz = y1
        if y1 <= 0.0:
            e1 = 0.5
        else:
            e1 = (eq_nu_u * e_nu - 0.5 * q0_l) / (nu * y1)
            e1 = min(max(e1, 0.0), 0.5)
        out[10 + k] = e1

    e1_zz = out[10]
    prefactor = p_mu * pa_mu[0] * pb[0]
    eq_mu_zz = min(0.5 * y0 + (1.0 - vis * pairs[0][2]) / 2.0 * click_mu, q_mu)
    e_mu = eq_mu_zz / q_mu if q_mu > 0.0 else 0.0
    e_mu = min(max(e_mu, 0.0), 1.0)

    nan = math.nan
    if bb84:
        c_value = nan
        phi = nan
        varphi = nan
        i_e = _h(out[11])
        privacy = 1.0 - i_e
    else:
        c_value = 0.0
        for k in range(1, 5):
            c_value += (1.0 - 2.0 * out[10 + k]) ** 2
        half_c = c_value / 2.0
        phi = min(math.sqrt(half_c) / (1.0 - e1_zz), 1.0)
        residual = half_c - (1.0 - e1_zz) ** 2 * phi ** 2
        if residual < -1e-12:
            return STATUS_INCONSISTENT
        if phi < 1.0 or e1_zz == 0.0 or residual <= 0.0:
            varphi = 0.0
        else:
            varphi = min(math.sqrt(residual) / e1_zz, 1.0)
        i_e = (1.0 - e1_zz) * _h((1.0 + phi) / 2.0) + e1_zz * _h((1.0 + varphi) / 2.0)
        if mode == MODE_RFI_IE:
            privacy = 1.0 - i_e
        else:
            privacy = 1.0 - _h(e1_zz)

    raw = prefactor * (-f * q_mu * _h(e_mu) + mu * math.exp(-mu) * y1_zz * privacy)
    no_key = not raw > 0.0 or y1_zz <= 0.0
    out[0] = raw
    out[1] = 0.0 if no_key else raw
    out[2] = c_value
    out[3] = phi
    out[4] = varphi
    out[5] = i_e
    out[6] = y1_zz
    out[7] = q_mu
    out[8] = e_mu
    out[9] = prefactor
    return STATUS_NO_KEY if no_key else STATUS_KEY
