# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-step assembly kernel.

Fused version of gradflow._kernels_py.assemble_rhs: one pass computes
traces, interface fluxes (with the optional positivity correction), the
volume term and the interface lifting.  Falls back transparently to the
numpy twin when this module is not built.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF BC_ZERO_FLUX = 0
DEF BC_DIRICHLET = 1
DEF BC_PERIODIC = 2


def assemble_rhs(double[:, ::1] rho_c, double[:, ::1] q_c, double[:, ::1] rho_g,
                 double[::1] gw, double[:, ::1] dphi_g,
                 double[::1] phi_l, double[::1] phi_r,
                 double[::1] dphi_l, double[::1] dphi_r,
                 double[::1] d2phi_l, double[::1] d2phi_r,
                 double h, double beta0, double beta1,
                 int bc_code, bint corrected, double[::1] bdata):
    cdef Py_ssize_t n = rho_c.shape[0]
    cdef Py_ssize_t k1 = rho_c.shape[1]
    cdef Py_ssize_t nq = gw.shape[0]
    cdef double s1 = 2.0 / h
    cdef double s2 = s1 * s1

    rhs_arr = np.zeros((n, k1))
    flux_arr = np.zeros(n + 1)
    beta_arr = np.zeros(n + 1)
    cdef double[:, ::1] rhs = rhs_arr
    cdef double[::1] flux = flux_arr
    cdef double[::1] beta_half = beta_arr

    cdef double[::1] mean_rho = np.zeros(n + 1)
    cdef double[::1] halfjump = np.zeros(n + 1)
    cdef double[::1] jump_rho = np.zeros(n + 1)

    # one-sided traces per cell edge
    cdef double[::1] q_le = np.zeros(n)
    cdef double[::1] q_re = np.zeros(n)
    cdef double[::1] dq_le = np.zeros(n)
    cdef double[::1] dq_re = np.zeros(n)
    cdef double[::1] d2q_le = np.zeros(n)
    cdef double[::1] d2q_re = np.zeros(n)
    cdef double[::1] r_le = np.zeros(n)
    cdef double[::1] r_re = np.zeros(n)

    cdef Py_ssize_t i, j, g, f
    cdef double accl, accr, jq, f0, af, bf, dq, w

    for i in range(n):
        accl = 0.0
        accr = 0.0
        for j in range(k1):
            accl += q_c[i, j] * phi_l[j]
            accr += q_c[i, j] * phi_r[j]
        q_le[i] = accl
        q_re[i] = accr
        accl = 0.0
        accr = 0.0
        for j in range(k1):
            accl += q_c[i, j] * dphi_l[j]
            accr += q_c[i, j] * dphi_r[j]
        dq_le[i] = accl * s1
        dq_re[i] = accr * s1
        accl = 0.0
        accr = 0.0
        for j in range(k1):
            accl += q_c[i, j] * d2phi_l[j]
            accr += q_c[i, j] * d2phi_r[j]
        d2q_le[i] = accl * s2
        d2q_re[i] = accr * s2
        accl = 0.0
        accr = 0.0
        for j in range(k1):
            accl += rho_c[i, j] * phi_l[j]
            accr += rho_c[i, j] * phi_r[j]
        r_le[i] = accl
        r_re[i] = accr

    for f in range(1, n):
        jq = q_le[f] - q_re[f - 1]
        flux[f] = beta0 * jq / h + 0.5 * (dq_le[f] + dq_re[f - 1]) \
            + beta1 * h * (d2q_le[f] - d2q_re[f - 1])
        mean_rho[f] = 0.5 * (r_le[f] + r_re[f - 1])
        halfjump[f] = 0.5 * jq
        jump_rho[f] = r_le[f] - r_re[f - 1]

    if bc_code == BC_PERIODIC:
        jq = q_le[0] - q_re[n - 1]
        f0 = beta0 * jq / h + 0.5 * (dq_le[0] + dq_re[n - 1]) \
            + beta1 * h * (d2q_le[0] - d2q_re[n - 1])
        flux[0] = f0
        flux[n] = f0
        mean_rho[0] = mean_rho[n] = 0.5 * (r_le[0] + r_re[n - 1])
        halfjump[0] = halfjump[n] = 0.5 * jq
        jump_rho[0] = jump_rho[n] = r_le[0] - r_re[n - 1]
    elif bc_code == BC_DIRICHLET:
        jq = q_le[0] - bdata[2]
        flux[0] = beta0 * jq / h + dq_le[0]
        mean_rho[0] = bdata[0]
        halfjump[0] = 0.5 * jq
        jq = bdata[3] - q_re[n - 1]
        flux[n] = beta0 * jq / h + dq_re[n - 1]
        mean_rho[n] = bdata[1]
        halfjump[n] = 0.5 * jq
    else:
        mean_rho[0] = r_le[0]
        mean_rho[n] = r_re[n - 1]

    if corrected:
        for f in range(n + 1):
            if bc_code == BC_DIRICHLET and (f == 0 or f == n):
                continue
            if mean_rho[f] > 0.0:
                beta_half[f] = (flux[f] if flux[f] >= 0.0 else -flux[f]) / mean_rho[f]
                flux[f] = flux[f] + 0.5 * beta_half[f] * jump_rho[f]

    cdef double[::1] wrdq = np.zeros(nq)   # gw * rho * dq_ref per node

    for i in range(n):
        for g in range(nq):
            dq = 0.0
            for f in range(k1):
                dq += q_c[i, f] * dphi_g[f, g]
            wrdq[g] = gw[g] * rho_g[i, g] * dq
        for j in range(k1):
            accl = 0.0
            for g in range(nq):
                accl += wrdq[g] * dphi_g[j, g]
            af = mean_rho[i + 1] * flux[i + 1]
            bf = mean_rho[i + 1] * halfjump[i + 1]
            w = af * phi_r[j] - s1 * bf * dphi_r[j]
            af = mean_rho[i] * flux[i]
            bf = mean_rho[i] * halfjump[i]
            w += -af * phi_l[j] - s1 * bf * dphi_l[j]
            rhs[i, j] = s1 * (w - s1 * accl)

    return rhs_arr, flux_arr, beta_arr
