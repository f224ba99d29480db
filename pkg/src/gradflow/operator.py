"""Spatial discretization: energy-flux projection, interface fluxes, RHS.

The scheme evolves rho through the projected energy flux
q_h = P(V + H'(rho_h) + W*rho_h); the diffusive interface flux combines the
q-jump, mean first derivative and second-derivative jump with weights
beta0/h and beta1*h, and the positivity correction adds
beta_{f} [rho]/2 with beta_f = |flux|/{rho}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .convolution import KernelMomentTable, build_moment_table, convolve
from .meshbasis import (Basis, DGField, GradflowError, Mesh1D, project_values,
                        quadrature_points)
from .problems import (DIRICHLET, PERIODIC, ZERO_FLUX, ProblemSpec,
                       SchemeParams, beta0_lower_bound)

PLAIN = "plain"
CORRECTED = "corrected"

_BC_CODES = {ZERO_FLUX: kernels.BC_ZERO_FLUX,
             DIRICHLET: kernels.BC_DIRICHLET,
             PERIODIC: kernels.BC_PERIODIC}


class PositivityError(GradflowError):
    """Singular internal energy met a nonpositive density."""


@dataclass(frozen=True)
class InterfaceFluxData:
    """Per-interior-interface quantities, for inspection and testing.

    Arrays have one entry per interior interface (1..N-1, plus the seam for
    periodic problems, appended last).
    """

    interfaces: np.ndarray
    jump_q: np.ndarray
    mean_q: np.ndarray
    mean_dq: np.ndarray
    jump_d2q: np.ndarray
    ddg_flux: np.ndarray
    jump_rho: np.ndarray
    mean_rho: np.ndarray
    beta_half: np.ndarray
    corrected_flux: np.ndarray


def _traces(field: DGField):
    b = field.basis
    return field.coeffs @ b.phi_left, field.coeffs @ b.phi_right


def compute_interface_data(q: DGField, rho: DGField, params: SchemeParams,
                           bc_kind: str = ZERO_FLUX) -> InterfaceFluxData:
    mesh, b = q.mesh, q.basis
    h = mesh.h
    s1, s2 = 2.0 / h, (2.0 / h) ** 2
    ql, qr = _traces(q)
    dql, dqr = (q.coeffs @ b.dphi_left) * s1, (q.coeffs @ b.dphi_right) * s1
    d2ql, d2qr = (q.coeffs @ b.d2phi_left) * s2, (q.coeffs @ b.d2phi_right) * s2
    rl, rr = _traces(rho)

    idx = np.arange(1, mesh.n_cells)
    minus = idx - 1
    plus = idx
    if bc_kind == PERIODIC:
        idx = np.concatenate((idx, [0]))
        minus = np.concatenate((minus, [mesh.n_cells - 1]))
        plus = np.concatenate((plus, [0]))

    jump_q = ql[plus] - qr[minus]
    mean_q = 0.5 * (ql[plus] + qr[minus])
    mean_dq = 0.5 * (dql[plus] + dqr[minus])
    jump_d2q = d2ql[plus] - d2qr[minus]
    flux = params.beta0 * jump_q / h + mean_dq + params.beta1 * h * jump_d2q
    jump_rho = rl[plus] - rr[minus]
    mean_rho = 0.5 * (rl[plus] + rr[minus])
    beta_half = np.zeros_like(flux)
    np.divide(np.abs(flux), mean_rho, out=beta_half, where=mean_rho > 0.0)
    corrected = flux + 0.5 * beta_half * jump_rho
    return InterfaceFluxData(idx, jump_q, mean_q, mean_dq, jump_d2q, flux,
                             jump_rho, mean_rho, beta_half, corrected)


def ddg_flux_at(q: DGField, interface: int, params: SchemeParams) -> float:
    """Diffusive flux value at one interior interface."""
    n = q.mesh.n_cells
    if not 1 <= interface <= n - 1:
        raise IndexError(f"interface {interface} is not interior (1..{n - 1})")
    b = q.basis
    h = q.mesh.h
    cm, cp = q.coeffs[interface - 1], q.coeffs[interface]
    jump = float(cp @ b.phi_left - cm @ b.phi_right)
    mean_dq = 0.5 * float(cp @ b.dphi_left + cm @ b.dphi_right) * (2.0 / h)
    jump_d2 = float(cp @ b.d2phi_left - cm @ b.d2phi_right) * (2.0 / h) ** 2
    return params.beta0 * jump / h + mean_dq + params.beta1 * h * jump_d2


def corrected_flux_at(q: DGField, rho: DGField, interface: int,
                      params: SchemeParams) -> tuple[float, float]:
    """Corrected flux and its adaptive coefficient at one interior interface."""
    flux = ddg_flux_at(q, interface, params)
    b = rho.basis
    rm = float(rho.coeffs[interface - 1] @ b.phi_right)
    rp = float(rho.coeffs[interface] @ b.phi_left)
    mean = 0.5 * (rp + rm)
    beta_half = abs(flux) / mean if mean > 0.0 else 0.0
    return flux + 0.5 * beta_half * (rp - rm), beta_half


class DGOperator:
    """All spatial pieces for one (problem, mesh, basis, params) quartet.

    Pure with respect to fields: methods never mutate their inputs, so an
    operator can serve several concurrent time integrations on the same
    problem.
    """

    def __init__(self, problem: ProblemSpec, mesh: Mesh1D, basis: Basis,
                 params: SchemeParams):
        if problem.bc_kind not in _BC_CODES:
            raise ValueError(f"unknown boundary kind {problem.bc_kind!r}")
        self.problem = problem
        self.mesh = mesh
        self.basis = basis
        self.params = params
        self.bc_code = _BC_CODES[problem.bc_kind]
        self.x_gauss = quadrature_points(mesh, basis)
        self.v_gauss = problem.confinement.v(self.x_gauss)
        self.table: KernelMomentTable | None = None
        if not problem.kernel.is_zero:
            self.table = build_moment_table(problem.kernel, mesh, basis)
        if basis.degree >= 1:
            bound = beta0_lower_bound(basis.degree, params.beta1)
            if params.beta0 <= bound:
                warnings.warn(
                    f"beta0={params.beta0} does not exceed the coercivity bound "
                    f"{bound:.4g} for degree {basis.degree}", stacklevel=2)

    # -- field evaluations -------------------------------------------------

    def rho_at_gauss(self, rho: DGField) -> np.ndarray:
        return rho.coeffs @ self.basis.phi_gauss

    def convolution(self, rho: DGField) -> np.ndarray | None:
        """W*rho at the registered points, or None for a zero kernel."""
        if self.table is None:
            return None
        return convolve(self.table, rho)

    def _check_positive(self, rho_g: np.ndarray, what: str):
        if not self.problem.internal_energy.singular_at_zero:
            return
        bad = np.argwhere(rho_g <= 0.0)
        if bad.size:
            cell, node = bad[0]
            raise PositivityError(
                f"{what} needs a positive density but rho={rho_g[cell, node]:.3e} "
                f"at cell {cell}, Gauss node {node}")

    def energy_flux(self, rho: DGField, t: float = 0.0,
                    conv: np.ndarray | None = None) -> tuple[DGField, np.ndarray | None]:
        """Projection of V + H'(rho) + W*rho onto the DG space."""
        if conv is None:
            conv = self.convolution(rho)
        rho_g = self.rho_at_gauss(rho)
        self._check_positive(rho_g, "H'(rho)")
        integrand = self.v_gauss + self.problem.internal_energy.h_prime(rho_g)
        if conv is not None:
            integrand = integrand + conv[:, self.table.idx_gauss]
        q = project_values(integrand, self.mesh, self.basis)
        return q, conv

    # -- boundary payload ---------------------------------------------------

    def boundary_data(self, t: float, conv: np.ndarray | None) -> np.ndarray:
        """Dirichlet payload [rho(a), rho(b), q_ext(a), q_ext(b)]; zeros otherwise."""
        if self.problem.bc_kind != DIRICHLET:
            return np.zeros(4)
        g = self.problem.dirichlet_data
        prob = self.problem
        a, b = prob.domain
        ga = float(np.asarray(g(t, np.asarray([a]))).ravel()[0])
        gb = float(np.asarray(g(t, np.asarray([b]))).ravel()[0])
        conv_a = conv_b = 0.0
        if conv is not None and self.table is not None:
            conv_a = float(conv[0, self.table.idx_left])
            conv_b = float(conv[-1, self.table.idx_right])
        hp = prob.internal_energy.h_prime
        q_ext_a = float(prob.confinement.v(np.asarray([a]))[0]) \
            + float(np.asarray(hp(ga))) + conv_a
        q_ext_b = float(prob.confinement.v(np.asarray([b]))[0]) \
            + float(np.asarray(hp(gb))) + conv_b
        return np.array([ga, gb, q_ext_a, q_ext_b])

    # -- assembly ------------------------------------------------------------

    def assemble_rhs(self, rho: DGField, q: DGField, mode: str = PLAIN,
                     t: float = 0.0, conv: np.ndarray | None = None,
                     rho_g: np.ndarray | None = None):
        """d(coeffs)/dt plus the interface fluxes actually used.

        Returns (rhs, flux, beta_half); flux has one entry per interface
        including the boundary entries mandated by the boundary condition.
        """
        if mode not in (PLAIN, CORRECTED):
            raise ValueError(f"unknown assembly mode {mode!r}")
        corrected = mode == CORRECTED
        if rho_g is None:
            rho_g = self.rho_at_gauss(rho)
        if corrected:
            rl, rr = _traces(rho)
            interior_mean = 0.5 * (rl[1:] + rr[:-1])
            if interior_mean.size and float(interior_mean.min()) < 0.0:
                raise GradflowError(
                    "corrected flux requires nonnegative interface density means; "
                    "apply the limiter before stepping")
        b = self.basis
        bdata = self.boundary_data(t, conv)
        rhs, flux, beta_half = kernels.assemble_rhs(
            rho.coeffs, q.coeffs, rho_g,
            b.gauss_weights, b.dphi_gauss,
            b.phi_left, b.phi_right, b.dphi_left, b.dphi_right,
            b.d2phi_left, b.d2phi_right,
            self.mesh.h, self.params.beta0, self.params.beta1,
            self.bc_code, corrected, bdata)
        return rhs, flux, beta_half

    # -- functionals ----------------------------------------------------------

    def discrete_energy(self, rho: DGField,
                        conv: np.ndarray | None = None) -> float:
        """E = int(V rho + H(rho)) + (1/2) iint W(x-y) rho rho."""
        rho_g = self.rho_at_gauss(rho)
        energy = self.problem.internal_energy
        if energy.singular_at_zero and (rho_g < 0.0).any():
            cell, node = np.argwhere(rho_g < 0.0)[0]
            raise PositivityError(
                f"H(rho) undefined for rho={rho_g[cell, node]:.3e} "
                f"at cell {cell}, Gauss node {node}")
        integrand = self.v_gauss * rho_g + energy.h(rho_g)
        if self.table is not None:
            if conv is None:
                conv = self.convolution(rho)
            integrand = integrand + 0.5 * rho_g * conv[:, self.table.idx_gauss]
        w = self.basis.gauss_weights
        return 0.5 * self.mesh.h * float(np.sum(integrand @ w))

    def energy_norm(self, q: DGField, rho: DGField) -> float:
        """sqrt(sum int rho |dq|^2 + sum (1/h) {rho} [q]^2) over interior interfaces."""
        b = self.basis
        h = self.mesh.h
        rho_g = self.rho_at_gauss(rho)
        dq_g = (q.coeffs @ b.dphi_gauss) * (2.0 / h)
        vol = 0.5 * h * float(np.sum((rho_g * dq_g * dq_g) @ b.gauss_weights))
        data = compute_interface_data(q, rho, self.params, self.problem.bc_kind)
        iface = float(np.sum(data.mean_rho * data.jump_q ** 2)) / h
        total = vol + iface
        if total < -1e-12 * (1.0 + abs(vol)):
            raise GradflowError(f"negative energy-norm radicand {total:.3e}")
        return math.sqrt(max(total, 0.0))
