"""Pure-numpy implementation of the per-step assembly kernels.

Mirrors gradflow._core (the Cython backend) operation for operation; the
dispatcher in gradflow.kernels picks whichever is available.  Interface
arrays are indexed 0..N with the minus side supplied by cell f-1 and the
plus side by cell f.
"""

from __future__ import annotations

import numpy as np

BC_ZERO_FLUX = 0
BC_DIRICHLET = 1
BC_PERIODIC = 2


def interface_fluxes(q_c, rho_c, phi_l, phi_r, dphi_l, dphi_r, d2phi_l, d2phi_r,
                     h, beta0, beta1, bc_code, corrected, bdata):
    """Diffusive interface fluxes and the positivity correction.

    Returns (flux, beta_half, mean_rho, halfjump_q, jump_rho), each (N+1,).
    flux is beta0 [q]/h + {dq} + beta1 h [d2q], plus beta_half [rho]/2 when
    `corrected`; halfjump_q is [q]/2 (the q - {q} trace factor).
    """
    n = q_c.shape[0]
    s1 = 2.0 / h
    s2 = s1 * s1

    q_r = q_c @ phi_r
    q_l = q_c @ phi_l
    dq_r = (q_c @ dphi_r) * s1
    dq_l = (q_c @ dphi_l) * s1
    d2q_r = (q_c @ d2phi_r) * s2
    d2q_l = (q_c @ d2phi_l) * s2
    r_r = rho_c @ phi_r
    r_l = rho_c @ phi_l

    flux = np.zeros(n + 1)
    beta_half = np.zeros(n + 1)
    mean_rho = np.zeros(n + 1)
    halfjump = np.zeros(n + 1)
    jump_rho = np.zeros(n + 1)

    jq = q_l[1:] - q_r[:-1]
    flux[1:n] = beta0 * jq / h + 0.5 * (dq_l[1:] + dq_r[:-1]) \
        + beta1 * h * (d2q_l[1:] - d2q_r[:-1])
    mean_rho[1:n] = 0.5 * (r_l[1:] + r_r[:-1])
    halfjump[1:n] = 0.5 * jq
    jump_rho[1:n] = r_l[1:] - r_r[:-1]

    if bc_code == BC_PERIODIC:
        jq0 = q_l[0] - q_r[n - 1]
        f0 = beta0 * jq0 / h + 0.5 * (dq_l[0] + dq_r[n - 1]) \
            + beta1 * h * (d2q_l[0] - d2q_r[n - 1])
        flux[0] = flux[n] = f0
        mean_rho[0] = mean_rho[n] = 0.5 * (r_l[0] + r_r[n - 1])
        halfjump[0] = halfjump[n] = 0.5 * jq0
        jump_rho[0] = jump_rho[n] = r_l[0] - r_r[n - 1]
    elif bc_code == BC_DIRICHLET:
        ja = q_l[0] - bdata[2]
        flux[0] = beta0 * ja / h + dq_l[0]
        mean_rho[0] = bdata[0]
        halfjump[0] = 0.5 * ja
        jb = bdata[3] - q_r[n - 1]
        flux[n] = beta0 * jb / h + dq_r[n - 1]
        mean_rho[n] = bdata[1]
        halfjump[n] = 0.5 * jb
    else:  # zero-flux: flux and the q - {q} factor vanish at the boundary
        mean_rho[0] = r_l[0]
        mean_rho[n] = r_r[n - 1]

    if corrected:
        np.divide(np.abs(flux), mean_rho, out=beta_half, where=mean_rho > 0.0)
        if bc_code == BC_DIRICHLET:
            beta_half[0] = beta_half[n] = 0.0
        flux = flux + 0.5 * beta_half * jump_rho

    return flux, beta_half, mean_rho, halfjump, jump_rho


def assemble_rhs(rho_c, q_c, rho_g, gw, dphi_g,
                 phi_l, phi_r, dphi_l, dphi_r, d2phi_l, d2phi_r,
                 h, beta0, beta1, bc_code, corrected, bdata):
    """Time derivative of the DG coefficients for given density and flux fields.

    rho_g holds the density at the volume Gauss nodes.  Returns
    (rhs, flux, beta_half) with rhs of shape (N, K).
    """
    s1 = 2.0 / h
    flux, beta_half, mean_rho, halfjump, _ = interface_fluxes(
        q_c, rho_c, phi_l, phi_r, dphi_l, dphi_r, d2phi_l, d2phi_r,
        h, beta0, beta1, bc_code, corrected, bdata)

    dq_g = q_c @ dphi_g
    vol = ((rho_g * dq_g) * gw[None, :]) @ dphi_g.T

    a = mean_rho * flux
    b = mean_rho * halfjump
    lift = (a[1:, None] * phi_r[None, :] - s1 * b[1:, None] * dphi_r[None, :]
            - a[:-1, None] * phi_l[None, :] - s1 * b[:-1, None] * dphi_l[None, :])
    rhs = s1 * (lift - s1 * vol)
    return rhs, flux, beta_half
