"""Uniform 1-D meshes, orthonormal Legendre bases, quadrature, and DG fields.

Everything lives on the reference cell [-1, 1].  Basis functions are the
Legendre polynomials scaled by sqrt((2j+1)/2) so that the reference mass
matrix is the identity; no linear solve appears anywhere downstream.
Physical derivatives pick up a factor (2/h) per order through the affine
map x = x_i + (h/2) xhat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import legendre as npleg

SQRT2 = math.sqrt(2.0)


class GradflowError(Exception):
    """Base class for solver errors."""


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1]; exact through degree 2n-1."""
    if n < 1:
        raise ValueError(f"need at least one quadrature node, got {n}")
    nodes, weights = npleg.leggauss(n)
    return nodes, weights


def gauss_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto nodes/weights on [-1, 1]; exact through degree 2n-3.

    Includes both endpoints.  Weights follow 2/(n(n-1) P_{n-1}(x)^2) and are
    symmetrized so the two endpoint weights are bitwise equal.
    """
    if n < 2:
        raise ValueError(f"Gauss-Lobatto needs at least 2 nodes, got {n}")
    if n == 2:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    e = np.zeros(n)
    e[n - 1] = 1.0
    interior = npleg.legroots(npleg.legder(e))
    nodes = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    p = npleg.legval(nodes, e)
    weights = 2.0 / (n * (n - 1) * p * p)
    # enforce exact symmetry of the rule
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def legendre_to_monomial(degree: int, orthonormal: bool = False) -> np.ndarray:
    """Matrix A with P_j(s) = sum_n A[j, n] s^n; optionally orthonormal-scaled."""
    out = np.zeros((degree + 1, degree + 1))
    for j in range(degree + 1):
        c = np.zeros(j + 1)
        c[j] = math.sqrt((2 * j + 1) / 2.0) if orthonormal else 1.0
        out[j, : j + 1] = npleg.leg2poly(c)
    return out


def legendre_table(points, degree: int, order: int = 0) -> np.ndarray:
    """Values of the orthonormal Legendre basis (or a derivative) at points.

    Returns array of shape (degree+1, len(points)).  Rows of polynomials
    whose degree is below `order` are exact zeros.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    out = np.zeros((degree + 1, pts.size))
    for j in range(degree + 1):
        if j < order:
            continue
        c = np.zeros(j + 1)
        c[j] = math.sqrt((2 * j + 1) / 2.0)
        if order:
            c = npleg.legder(c, order)
        out[j] = npleg.legval(pts, c)
    return out


@dataclass(frozen=True)
class Mesh1D:
    """Uniform partition of [a, b] into n_cells cells."""

    a: float
    b: float
    n_cells: int
    h: float
    interfaces: np.ndarray  # (n_cells+1,)
    centers: np.ndarray     # (n_cells,)


def build_mesh(a: float, b: float, n_cells: int) -> Mesh1D:
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
        raise ValueError(f"invalid interval [{a}, {b}]")
    if int(n_cells) != n_cells or n_cells < 2:
        raise ValueError(f"need at least 2 cells, got {n_cells}")
    n_cells = int(n_cells)
    interfaces = np.linspace(a, b, n_cells + 1)
    centers = 0.5 * (interfaces[:-1] + interfaces[1:])
    return Mesh1D(a, b, n_cells, (b - a) / n_cells, interfaces, centers)


@dataclass(frozen=True)
class Basis:
    """Orthonormal Legendre basis with its quadrature and trace tables.

    gauss_* is the volume rule used for nonlinear integrands (k+3 points by
    default); lobatto_* is the rule entering the positivity CFL, with
    normalized weights summing to 1 so that sum(w * rho(xhat)) is the cell
    average.
    """

    degree: int
    gauss_nodes: np.ndarray
    gauss_weights: np.ndarray
    lobatto_nodes: np.ndarray
    lobatto_weights: np.ndarray      # normalized: sum = 1
    phi_gauss: np.ndarray            # (k+1, n_gauss)
    dphi_gauss: np.ndarray           # reference derivative
    phi_lobatto: np.ndarray          # (k+1, n_lobatto)
    phi_left: np.ndarray             # traces at xhat = -1
    phi_right: np.ndarray            # traces at xhat = +1
    dphi_left: np.ndarray
    dphi_right: np.ndarray
    d2phi_left: np.ndarray
    d2phi_right: np.ndarray
    proj_matrix: np.ndarray          # (k+1, n_gauss): w_g * phi_jg

    @property
    def n_gauss(self) -> int:
        return self.gauss_nodes.size

    @property
    def n_lobatto(self) -> int:
        return self.lobatto_nodes.size

    @property
    def omega1(self) -> float:
        """Normalized endpoint Lobatto weight (enters the positivity CFL)."""
        return float(self.lobatto_weights[0])


def min_lobatto_points(degree: int) -> int:
    """Smallest Lobatto rule exact for degree-k cell averages: ceil((k+3)/2)."""
    return max(2, math.ceil((degree + 3) / 2))


def make_basis(degree: int, n_gauss: int | None = None,
               n_lobatto: int | None = None) -> Basis:
    if degree < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got {degree}")
    if n_gauss is None:
        n_gauss = degree + 3
    if n_lobatto is None:
        n_lobatto = min_lobatto_points(degree)
    if n_lobatto < min_lobatto_points(degree):
        raise ValueError(
            f"{n_lobatto}-point Lobatto rule cannot integrate degree-{degree} "
            f"cell averages exactly; need at least {min_lobatto_points(degree)}")
    gn, gw = gauss_legendre(n_gauss)
    ln, lw = gauss_lobatto(n_lobatto)
    phi_g = legendre_table(gn, degree, 0)
    ends = legendre_table([-1.0, 1.0], degree, 0)
    dends = legendre_table([-1.0, 1.0], degree, 1)
    d2ends = legendre_table([-1.0, 1.0], degree, 2)
    return Basis(
        degree=degree,
        gauss_nodes=gn,
        gauss_weights=gw,
        lobatto_nodes=ln,
        lobatto_weights=lw / 2.0,
        phi_gauss=phi_g,
        dphi_gauss=legendre_table(gn, degree, 1),
        phi_lobatto=legendre_table(ln, degree, 0),
        phi_left=np.ascontiguousarray(ends[:, 0]),
        phi_right=np.ascontiguousarray(ends[:, 1]),
        dphi_left=np.ascontiguousarray(dends[:, 0]),
        dphi_right=np.ascontiguousarray(dends[:, 1]),
        d2phi_left=np.ascontiguousarray(d2ends[:, 0]),
        d2phi_right=np.ascontiguousarray(d2ends[:, 1]),
        proj_matrix=gw[None, :] * phi_g,
    )


@dataclass
class DGField:
    """Piecewise polynomial: per-cell coefficients in the orthonormal basis."""

    mesh: Mesh1D
    basis: Basis
    coeffs: np.ndarray  # (n_cells, degree+1), cell-major

    @property
    def degree(self) -> int:
        return self.basis.degree

    def copy(self) -> "DGField":
        return DGField(self.mesh, self.basis, self.coeffs.copy())

    def with_coeffs(self, coeffs: np.ndarray) -> "DGField":
        return DGField(self.mesh, self.basis, coeffs)


def zeros_like_field(mesh: Mesh1D, basis: Basis) -> DGField:
    return DGField(mesh, basis, np.zeros((mesh.n_cells, basis.degree + 1)))


def quadrature_points(mesh: Mesh1D, basis: Basis) -> np.ndarray:
    """Physical Gauss nodes, shape (n_cells, n_gauss)."""
    return mesh.centers[:, None] + 0.5 * mesh.h * basis.gauss_nodes[None, :]


def _sample(f: Callable, x: np.ndarray) -> np.ndarray:
    v = np.asarray(f(x), dtype=float)
    if v.shape != x.shape:
        if v.ndim == 0:
            return np.full_like(x, float(v))
        v = np.vectorize(f, otypes=[float])(x)
    return v


def project_l2(f: Callable, mesh: Mesh1D, basis: Basis) -> DGField:
    """Cell-wise L2 projection of f onto the DG space.

    The constant part of each cell is split off before quadrature so that
    spatially constant integrands project to a pure constant mode exactly;
    discrete equilibria then stay bit-exact fixed points downstream.
    """
    x = quadrature_points(mesh, basis)
    return project_values(_sample(f, x), mesh, basis)


def project_values(values: np.ndarray, mesh: Mesh1D, basis: Basis) -> DGField:
    """L2 projection from values sampled at the cell Gauss nodes."""
    v0 = values[:, :1]
    coeffs = (values - v0) @ basis.proj_matrix.T
    coeffs[:, 0] += v0[:, 0] * SQRT2
    return DGField(mesh, basis, coeffs)


def values_at(field: DGField, table: np.ndarray) -> np.ndarray:
    """Evaluate on every cell at the reference points behind `table`."""
    return field.coeffs @ table


def evaluate(field: DGField, cell: int, ref_point: float,
             derivative_order: int = 0) -> float:
    """Value of the cell polynomial (or derivative) at a reference point.

    The chain-rule factor (2/h)^order converts reference derivatives to
    physical ones.
    """
    n = field.mesh.n_cells
    if not -n <= cell < n:
        raise IndexError(f"cell index {cell} out of range for {n} cells")
    if derivative_order not in (0, 1, 2):
        raise ValueError(f"derivative order must be 0, 1 or 2, got {derivative_order}")
    if not -1.0 <= ref_point <= 1.0:
        raise ValueError(f"reference point {ref_point} outside [-1, 1]")
    table = legendre_table([ref_point], field.degree, derivative_order)
    scale = (2.0 / field.mesh.h) ** derivative_order
    return float(field.coeffs[cell] @ table[:, 0]) * scale


def cell_average(field: DGField, cell: int) -> float:
    """(1/h) * integral over the cell; exact via the constant-mode coefficient."""
    n = field.mesh.n_cells
    if not -n <= cell < n:
        raise IndexError(f"cell index {cell} out of range for {n} cells")
    return float(field.coeffs[cell, 0]) / SQRT2


def cell_averages(field: DGField) -> np.ndarray:
    return field.coeffs[:, 0] / SQRT2


def total_mass(field: DGField) -> float:
    return field.mesh.h * float(np.sum(cell_averages(field)))


class TraceValues(NamedTuple):
    left: float
    right: float
    jump: float
    mean: float


def interface_trace(field: DGField, interface: int) -> TraceValues:
    """One-sided limits at an interior interface (index 1..N-1).

    jump = right - left, mean = (right + left)/2.  Boundary traces are the
    business of the boundary-condition handling, not of this routine.
    """
    n = field.mesh.n_cells
    if not 1 <= interface <= n - 1:
        raise IndexError(
            f"interface {interface} is not interior (valid range 1..{n - 1})")
    left = float(field.coeffs[interface - 1] @ field.basis.phi_right)
    right = float(field.coeffs[interface] @ field.basis.phi_left)
    return TraceValues(left, right, right - left, 0.5 * (right + left))


def l2_norm(field: DGField) -> float:
    """Physical L2 norm; exact in the orthonormal basis."""
    return math.sqrt(0.5 * field.mesh.h * float(np.sum(field.coeffs ** 2)))


def refine_basis(basis: Basis, n_gauss: int) -> Basis:
    """Same degree, different volume quadrature (for over-integration tests)."""
    return make_basis(basis.degree, n_gauss=n_gauss, n_lobatto=basis.n_lobatto)
