# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled key-rate kernel; mirror of ``_pykernel.py``."""
from libc.math cimport cos, sin, exp, expm1, sqrt, log2, pow, isfinite, fabs, INFINITY, NAN

cdef int OUT_SIZE = 16
cdef double MARGIN = 1e-6
cdef double MU_MAX = 1.0

cdef inline double _h(double x) nogil:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


cdef inline double _clip(double v, double lo, double hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


cdef bint _feasible(const double[::1] x, bint bb84) nogil:
    cdef int k
    cdef double pz, px
    for k in range(10):
        if not isfinite(x[k]):
            return False
    if not (x[1] >= MARGIN and x[0] - x[1] >= MARGIN and x[0] <= MU_MAX):
        return False
    if not (x[2] >= MARGIN and x[3] >= MARGIN and 1.0 - x[2] - x[3] >= MARGIN):
        return False
    for k in range(4, 10, 2):
        pz = x[k]
        px = x[k + 1]
        if pz < MARGIN or px < MARGIN:
            return False
        if bb84:
            if fabs(pz + px - 1.0) > 1e-12:
                return False
        elif 1.0 - pz - px < MARGIN:
            return False
    return True


cpdef int evaluate(const double[::1] x, const double[::1] scen, int mode, double[::1] out):
    cdef double eta = scen[0], y0 = scen[1], ed = scen[2], alpha = scen[3]
    cdef double beta = scen[4], dist = scen[5], n_pulses = scen[6], gamma = scen[7], f = scen[8]
    cdef bint bb84 = mode == 2
    cdef int k, n_pairs, ia, ib
    cdef double pa_mu[3]
    cdef double pa_nu[3]
    cdef double pb[3]
    cdef int alice_idx[5]
    cdef int bob_idx[5]
    cdef double kappa[5]
    cdef double mu, nu, p_mu, p_nu, p_vac, t, click_mu, click_nu, q_mu, q_nu
    cdef double q0_l, q0_u, w, cb, sb, vis, e_nu, e_mu, mu2, nu2, y1_scale, y1_zz
    cdef double sel_mu, sel_nu, e1_true, eq_nu, q_mu_u, q_nu_l, eq_nu_u, n_mu, n_nu, y1, e1
    cdef double e1_zz, prefactor, eq_mu_zz, err_mu, c_value, phi, varphi, i_e, privacy
    cdef double half_c, residual, raw
    cdef bint no_key

    for k in range(OUT_SIZE):
        out[k] = 0.0
    if not _feasible(x, bb84):
        out[0] = -INFINITY
        return -1

    mu = x[0]; nu = x[1]; p_mu = x[2]; p_nu = x[3]
    pa_mu[0] = x[4]; pa_mu[1] = x[5]; pa_mu[2] = 1.0 - x[4] - x[5]
    pa_nu[0] = x[6]; pa_nu[1] = x[7]; pa_nu[2] = 1.0 - x[6] - x[7]
    pb[0] = x[8]; pb[1] = x[9]; pb[2] = 1.0 - x[8] - x[9]
    p_vac = 1.0 - p_mu - p_nu

    t = eta * pow(10.0, -alpha * dist / 10.0)
    click_mu = -expm1(-t * mu)
    click_nu = -expm1(-t * nu)
    q_mu = y0 + (1.0 - y0) * click_mu
    q_nu = y0 + (1.0 - y0) * click_nu

    if y0 == 0.0:
        q0_l = 0.0
        q0_u = 0.0
    elif gamma == 0.0:
        q0_l = y0
        q0_u = y0
    else:
        w = gamma / sqrt(n_pulses * p_vac * y0)
        q0_l = _clip(y0 * (1.0 - w), 0.0, INFINITY)
        q0_u = _clip(y0 * (1.0 + w), -INFINITY, 1.0)

    cb = cos(beta)
    sb = sin(beta)
    vis = 1.0 - 2.0 * ed
    alice_idx[0] = 0; bob_idx[0] = 0; kappa[0] = cb if bb84 else 1.0
    alice_idx[1] = 1; bob_idx[1] = 1; kappa[1] = cb
    alice_idx[2] = 1; bob_idx[2] = 2; kappa[2] = sb
    alice_idx[3] = 2; bob_idx[3] = 1; kappa[3] = -sb
    alice_idx[4] = 2; bob_idx[4] = 2; kappa[4] = cb
    n_pairs = 2 if bb84 else 5
    e_nu = exp(nu)
    e_mu = exp(mu)
    mu2 = mu * mu
    nu2 = nu * nu
    y1_scale = mu / (mu * nu - nu2)
    y1_zz = 0.0
    for k in range(n_pairs):
        ia = alice_idx[k]
        ib = bob_idx[k]
        sel_mu = p_mu * pa_mu[ia] * pb[ib]
        sel_nu = p_nu * pa_nu[ia] * pb[ib]
        if sel_mu <= 0.0 or sel_nu <= 0.0:
            return -2
        e1_true = (1.0 - vis * kappa[k]) / 2.0
        eq_nu = 0.5 * y0 + e1_true * click_nu
        if eq_nu > q_nu:
            eq_nu = q_nu
        if gamma == 0.0:
            q_mu_u = q_mu
            q_nu_l = q_nu
            eq_nu_u = eq_nu
        else:
            if eq_nu <= 0.0 or q_nu <= 0.0 or q_mu <= 0.0:
                return -3
            n_mu = n_pulses * sel_mu
            n_nu = n_pulses * sel_nu
            q_mu_u = _clip(q_mu * (1.0 + gamma / sqrt(n_mu * q_mu)), -INFINITY, 1.0)
            q_nu_l = _clip(q_nu * (1.0 - gamma / sqrt(n_nu * q_nu)), 0.0, INFINITY)
            eq_nu_u = _clip(eq_nu * (1.0 + gamma / sqrt(n_nu * eq_nu)), -INFINITY, 1.0)
        y1 = y1_scale * (q_nu_l * e_nu - q_mu_u * e_mu * nu2 / mu2 - (mu2 - nu2) / mu2 * q0_u)
        y1 = _clip(y1, 0.0, 1.0)
        if k == 0:
            y1_zz = y1
        if y1 <= 0.0:
            e1 = 0.5
        else:
            e1 = _clip((eq_nu_u * e_nu - 0.5 * q0_l) / (nu * y1), 0.0, 0.5)
        out[10 + k] = e1

    e1_zz = out[10]
    prefactor = p_mu * pa_mu[0] * pb[0]
    eq_mu_zz = 0.5 * y0 + (1.0 - vis * kappa[0]) / 2.0 * click_mu
    if eq_mu_zz > q_mu:
        eq_mu_zz = q_mu
    err_mu = eq_mu_zz / q_mu if q_mu > 0.0 else 0.0
    err_mu = _clip(err_mu, 0.0, 1.0)

    if bb84:
        c_value = NAN
        phi = NAN
        varphi = NAN
        i_e = _h(out[11])
        privacy = 1.0 - i_e
    else:
        c_value = 0.0
        for k in range(1, 5):
            c_value += (1.0 - 2.0 * out[10 + k]) * (1.0 - 2.0 * out[10 + k])
        half_c = c_value / 2.0
        phi = sqrt(half_c) / (1.0 - e1_zz)
        if phi > 1.0:
            phi = 1.0
        residual = half_c - (1.0 - e1_zz) * (1.0 - e1_zz) * phi * phi
        if residual < -1e-12:
            return -4
        if phi < 1.0 or e1_zz == 0.0 or residual <= 0.0:
            varphi = 0.0
        else:
            varphi = sqrt(residual) / e1_zz
            if varphi > 1.0:
                varphi = 1.0
        i_e = (1.0 - e1_zz) * _h((1.0 + phi) / 2.0) + e1_zz * _h((1.0 + varphi) / 2.0)
        if mode == 0:
            privacy = 1.0 - i_e
        else:
            privacy = 1.0 - _h(e1_zz)

    raw = prefactor * (-f * q_mu * _h(err_mu) + mu * exp(-mu) * y1_zz * privacy)
    no_key = not raw > 0.0 or y1_zz <= 0.0
    out[0] = raw
    out[1] = 0.0 if no_key else raw
    out[2] = c_value
    out[3] = phi
    out[4] = varphi
    out[5] = i_e
    out[6] = y1_zz
    out[7] = q_mu
    out[8] = err_mu
    out[9] = prefactor
    return 1 if no_key else 0
