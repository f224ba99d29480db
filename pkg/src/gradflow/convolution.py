"""Nonlocal term (W * rho_h)(x) evaluated at per-cell reference points.

On a uniform mesh the source-cell moments int_{I_m} W(x - y) phi_j(y) dy
depend only on the cell offset d = i - m and the in-cell position of x, so
the table stores O(N) moment blocks instead of O(N^2) pairs and expands them
into a dense contraction matrix once per (mesh, basis, kernel).

Logarithmic singularities are integrated in closed form via monomial moments
of ln|c - s|; piecewise-polynomial kernels are integrated exactly by
splitting source cells at kink preimages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .meshbasis import (Basis, DGField, Mesh1D, gauss_legendre,
                        legendre_table, legendre_to_monomial)
from .problems import InteractionKernel

SQRT2 = math.sqrt(2.0)


def _log_primitive(u: np.ndarray, i: int) -> np.ndarray:
    """Antiderivative of u^i ln|u|, continuous through u = 0 (value 0 there)."""
    u = np.asarray(u, dtype=float)
    safe = np.where(u == 0.0, 1.0, np.abs(u))
    p = u ** (i + 1)
    return np.where(u == 0.0, 0.0, p * ((i + 1) * np.log(safe) - 1.0) / (i + 1) ** 2)


def log_monomial_moments(c: np.ndarray, nmax: int) -> np.ndarray:
    """m_n(c) = int_{-1}^{1} s^n ln|c - s| ds for n = 0..nmax, shape (len(c), nmax+1).

    Uses the shifted primitive of u^i ln|u|, which stays finite when an
    endpoint of the source interval touches the singularity (|c| = 1).
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    gp = np.stack([_log_primitive(c + 1.0, i) - _log_primitive(c - 1.0, i)
                   for i in range(nmax + 1)], axis=1)  # (nc, nmax+1)
    out = np.zeros((c.size, nmax + 1))
    for n in range(nmax + 1):
        acc = np.zeros_like(c)
        for i in range(n + 1):
            acc += math.comb(n, i) * (-1.0) ** i * c ** (n - i) * gp[:, i]
        out[:, n] = acc
    return out


@dataclass(frozen=True)
class KernelMomentTable:
    """Per-offset moment blocks and their dense expansion for one mesh/basis."""

    mesh: Mesh1D
    basis: Basis
    kernel: InteractionKernel
    ref_points: np.ndarray        # (n_points,) in-cell reference coordinates
    blocks: np.ndarray            # (2N-1, n_points, k+1); offset d at index d+N-1
    matrix: np.ndarray            # (N*n_points, N*(k+1))
    idx_gauss: slice              # columns of ref_points holding the Gauss nodes
    idx_left: int                 # column of xhat = -1
    idx_right: int                # column of xhat = +1

    @property
    def n_points(self) -> int:
        return self.ref_points.size


class _MomentIntegrator:
    """Computes one offset block; shared by the table and the O(N^2) reference."""

    def __init__(self, kernel: InteractionKernel, basis: Basis, h: float,
                 ref_points: np.ndarray, n_conv: int):
        self.kernel = kernel
        self.basis = basis
        self.h = h
        self.ref_points = ref_points
        self.n_conv = n_conv
        self.conv_nodes, self.conv_weights = gauss_legendre(n_conv)
        self.phi_conv = legendre_table(self.conv_nodes, basis.degree, 0)
        self.leg2mono = legendre_to_monomial(basis.degree)
        self.norms = np.sqrt((2.0 * np.arange(basis.degree + 1) + 1.0) / 2.0)

    def block(self, d: int) -> np.ndarray:
        """Moments int_{I_m} W(x - y) phi_j(y) dy for eval points at offset d.

        Relative coordinates throughout: x - y = (h/2)(c - s) with
        c = 2d + xhat, which is what makes blocks reusable across cell pairs.
        """
        kern = self.kernel
        k1 = self.basis.degree + 1
        npts = self.ref_points.size
        if kern.is_zero:
            return np.zeros((npts, k1))
        if kern.support_radius is not None and abs(d) >= 1 \
                and self.h * (abs(d) - 1) >= kern.support_radius:
            return np.zeros((npts, k1))
        c = 2.0 * d + self.ref_points
        if kern.is_singular and abs(d) <= 1:
            smooth = kern.smooth_part or (lambda x: np.zeros_like(x))
            block = self._quadrature(smooth, c)
            block += kern.log_coefficient * self._log_block(c)
            return block
        return self._quadrature(kern.w, c)

    def _quadrature(self, w, c: np.ndarray) -> np.ndarray:
        breaks = self._active_breakpoints(c)
        if breaks is None:
            args = 0.5 * self.h * (c[:, None] - self.conv_nodes[None, :])
            wv = w(args) * self.conv_weights[None, :]
            return 0.5 * self.h * (wv @ self.phi_conv.T)
        out = np.zeros((c.size, self.basis.degree + 1))
        for p, cp in enumerate(c):
            splits = np.sort(np.unique(np.concatenate(
                ([-1.0], breaks[p], [1.0]))))
            for lo, hi in zip(splits[:-1], splits[1:]):
                if hi <= lo:
                    continue
                half = 0.5 * (hi - lo)
                t = 0.5 * (hi + lo) + half * self.conv_nodes
                wv = w(0.5 * self.h * (cp - t)) * self.conv_weights
                out[p] += 0.5 * self.h * half * (wv @ legendre_table(
                    t, self.basis.degree, 0).T)
        return out

    def _active_breakpoints(self, c: np.ndarray):
        """Per-point kink preimages inside (-1, 1), or None when there are none."""
        if not self.kernel.breakpoints:
            return None
        pre = c[:, None] - (2.0 / self.h) * np.asarray(self.kernel.breakpoints)
        inside = (pre > -1.0) & (pre < 1.0)
        if not inside.any():
            return None
        return [pre[p][inside[p]] for p in range(c.size)]

    def _log_block(self, c: np.ndarray) -> np.ndarray:
        """(h/2) int ln((h/2)|c - s|) phi_j(s) ds via closed-form moments."""
        mono = log_monomial_moments(c, self.basis.degree)     # (npts, k+1)
        lam = mono @ self.leg2mono.T                          # plain Legendre
        block = 0.5 * self.h * lam * self.norms[None, :]
        block[:, 0] += 0.5 * self.h * math.log(0.5 * self.h) * SQRT2
        return block


def default_ref_points(basis: Basis) -> np.ndarray:
    """Gauss nodes plus both cell endpoints (boundary traces of W*rho)."""
    return np.concatenate((basis.gauss_nodes, [-1.0, 1.0]))


def build_moment_table(kernel: InteractionKernel, mesh: Mesh1D, basis: Basis,
                       eval_points: np.ndarray | None = None,
                       n_conv: int | None = None) -> KernelMomentTable:
    if eval_points is None:
        ref_points = default_ref_points(basis)
        idx_gauss = slice(0, basis.n_gauss)
        idx_left, idx_right = basis.n_gauss, basis.n_gauss + 1
    else:
        ref_points = np.asarray(eval_points, dtype=float)
        if np.any(np.abs(ref_points) > 1.0):
            raise ValueError("evaluation points must lie in [-1, 1]")
        idx_gauss = slice(0, ref_points.size)
        idx_left = idx_right = -1
    if n_conv is None:
        n_conv = max(basis.degree + 4, 12)
    n = mesh.n_cells
    integ = _MomentIntegrator(kernel, basis, mesh.h, ref_points, n_conv)
    blocks = np.stack([integ.block(d) for d in range(-(n - 1), n)])
    matrix = _expand(blocks, n)
    return KernelMomentTable(mesh, basis, kernel, ref_points, blocks, matrix,
                             idx_gauss, idx_left, idx_right)


def _expand(blocks: np.ndarray, n: int) -> np.ndarray:
    npts, k1 = blocks.shape[1], blocks.shape[2]
    offsets = np.arange(n)[:, None] - np.arange(n)[None, :] + (n - 1)
    full = blocks[offsets]                       # (N, N, npts, k+1)
    return np.ascontiguousarray(
        full.transpose(0, 2, 1, 3).reshape(n * npts, n * k1))


def convolve(table: KernelMomentTable, rho: DGField) -> np.ndarray:
    """(W * rho)(x) at every registered point; shape (n_cells, n_points)."""
    if rho.mesh is not table.mesh and rho.mesh.n_cells != table.mesh.n_cells:
        raise ValueError("field and moment table live on different meshes")
    n = table.mesh.n_cells
    return (table.matrix @ rho.coeffs.ravel()).reshape(n, table.n_points)


def convolve_reference(kernel: InteractionKernel, mesh: Mesh1D, basis: Basis,
                       rho: DGField, eval_points: np.ndarray | None = None,
                       n_conv: int | None = None) -> np.ndarray:
    """Naive O(N^2) double loop over (evaluation cell, source cell).

    Recomputes every pairwise moment, assembles the same dense matrix shape,
    and applies the same contraction; used as the bit-identical oracle for
    the translation-invariant fast path.
    """
    if eval_points is None:
        ref_points = default_ref_points(basis)
    else:
        ref_points = np.asarray(eval_points, dtype=float)
    if n_conv is None:
        n_conv = max(basis.degree + 4, 12)
    n = mesh.n_cells
    k1 = basis.degree + 1
    npts = ref_points.size
    integ = _MomentIntegrator(kernel, basis, mesh.h, ref_points, n_conv)
    matrix = np.empty((n * npts, n * k1))
    for i in range(n):
        for m in range(n):
            matrix[i * npts:(i + 1) * npts, m * k1:(m + 1) * k1] = \
                integ.block(i - m)
    return (matrix @ rho.coeffs.ravel()).reshape(n, npts)


def interaction_energy(table: KernelMomentTable, rho: DGField) -> float:
    """(1/2) double-integral of W(x - y) rho(x) rho(y)."""
    basis = table.basis
    conv = convolve(table, rho)[:, table.idx_gauss]
    rho_g = rho.coeffs @ basis.phi_gauss
    return 0.5 * 0.5 * table.mesh.h * float(
        np.sum(basis.gauss_weights[None, :] * rho_g * conv))
