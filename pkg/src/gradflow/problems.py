"""Model ingredients and the built-in benchmark catalog.

A problem is the triple (H, V, W) plus domain, boundary-condition kind and
initial datum.  Six catalog entries cover heat-equation accuracy testing,
porous-medium relaxation, attractive-repulsive aggregation, nonlinear
diffusion against compact and Gaussian attraction kernels, and a double-well
confinement, each with its known exact solution or steady state where one
exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

ZERO_FLUX = "zero-flux"
DIRICHLET = "dirichlet"
PERIODIC = "periodic"
BC_KINDS = (ZERO_FLUX, DIRICHLET, PERIODIC)


@dataclass(frozen=True)
class InternalEnergy:
    """Density of internal energy H with its first two derivatives.

    `singular_at_zero` marks H' that blows up as rho -> 0+ (entropy case);
    the operator refuses to evaluate it at nonpositive densities instead of
    silently clamping.
    """

    kind: str  # "entropy" | "power" | "zero"
    h: Callable[[np.ndarray], np.ndarray]
    h_prime: Callable[[np.ndarray], np.ndarray]
    h_double_prime: Callable[[np.ndarray], np.ndarray]
    singular_at_zero: bool = False
    nu: float | None = None
    m: float | None = None


def entropy_energy() -> InternalEnergy:
    """H(rho) = rho (log rho - 1): linear (heat) diffusion."""
    def h(r):
        r = np.asarray(r, dtype=float)
        return np.where(r > 0.0, r * (np.log(np.where(r > 0.0, r, 1.0)) - 1.0), 0.0)

    return InternalEnergy(
        kind="entropy",
        h=h,
        h_prime=lambda r: np.log(r),
        h_double_prime=lambda r: 1.0 / np.asarray(r, dtype=float),
        singular_at_zero=True,
    )


def power_energy(nu: float, m: float) -> InternalEnergy:
    """H(rho) = (nu/m) rho^m: porous-medium type diffusion (m > 1)."""
    if m <= 1.0:
        raise ValueError(f"power energy needs m > 1, got {m}")

    return InternalEnergy(
        kind="power",
        h=lambda r: (nu / m) * np.asarray(r, dtype=float) ** m,
        h_prime=lambda r: nu * np.asarray(r, dtype=float) ** (m - 1.0),
        h_double_prime=lambda r: nu * (m - 1.0) * np.asarray(r, dtype=float) ** (m - 2.0),
        nu=nu,
        m=m,
    )


def zero_energy() -> InternalEnergy:
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    return InternalEnergy(kind="zero", h=zero, h_prime=zero, h_double_prime=zero)


@dataclass(frozen=True)
class ConfinementPotential:
    kind: str  # "zero" | "quadratic" | "double-well" | "custom"
    v: Callable[[np.ndarray], np.ndarray]
    v_prime: Callable[[np.ndarray], np.ndarray]


def zero_potential() -> ConfinementPotential:
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return ConfinementPotential("zero", zero, zero)


def quadratic_potential() -> ConfinementPotential:
    return ConfinementPotential(
        "quadratic",
        v=lambda x: 0.5 * np.asarray(x, dtype=float) ** 2,
        v_prime=lambda x: np.asarray(x, dtype=float),
    )


def double_well_potential() -> ConfinementPotential:
    """V(x) = x^4 + 0.4 x^3 - 5 x^2 (asymmetric double well)."""
    def v(x):
        x = np.asarray(x, dtype=float)
        return x ** 4 + 0.4 * x ** 3 - 5.0 * x ** 2

    def vp(x):
        x = np.asarray(x, dtype=float)
        return 4.0 * x ** 3 + 1.2 * x ** 2 - 10.0 * x

    return ConfinementPotential("double-well", v, vp)


@dataclass(frozen=True)
class InteractionKernel:
    """Symmetric interaction kernel W with quadrature metadata.

    `log_coefficient` is the weight of a ln|x| part split off for closed-form
    moment integration near the singularity; `smooth_part` is the remainder.
    `breakpoints` are kink locations where piecewise-polynomial kernels lose
    smoothness (source-cell integrals split there), and `support_radius` lets
    the moment table skip offsets with no kernel support overlap.
    """

    kind: str  # "zero" | "attractive-repulsive" | "compact-well" | "gaussian" | "custom"
    w: Callable[[np.ndarray], np.ndarray]
    smooth_part: Callable[[np.ndarray], np.ndarray] | None = None
    log_coefficient: float = 0.0
    breakpoints: tuple[float, ...] = ()
    support_radius: float | None = None

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    @property
    def is_singular(self) -> bool:
        return self.log_coefficient != 0.0


def zero_kernel() -> InteractionKernel:
    return InteractionKernel(
        "zero", w=lambda x: np.zeros_like(np.asarray(x, dtype=float)))


def attractive_repulsive_kernel() -> InteractionKernel:
    """W(x) = |x|^2/2 - ln|x|: quadratic attraction, logarithmic repulsion."""
    def w(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        return 0.5 * x ** 2 - np.log(np.where(ax > 0.0, ax, 1.0))

    return InteractionKernel(
        "attractive-repulsive",
        w=w,
        smooth_part=lambda x: 0.5 * np.asarray(x, dtype=float) ** 2,
        log_coefficient=-1.0,
    )


def compact_well_kernel() -> InteractionKernel:
    """W(x) = -(1 - |x|)_+ : compactly supported attraction."""
    def w(x):
        x = np.asarray(x, dtype=float)
        return -np.maximum(1.0 - np.abs(x), 0.0)

    return InteractionKernel(
        "compact-well", w=w, breakpoints=(-1.0, 0.0, 1.0), support_radius=1.0)


def gaussian_kernel() -> InteractionKernel:
    """W(x) = -exp(-|x|^2/4): smooth global attraction."""
    def w(x):
        x = np.asarray(x, dtype=float)
        return -np.exp(-0.25 * x ** 2)

    return InteractionKernel("gaussian", w=w)


@dataclass(frozen=True)
class ProblemSpec:
    """Complete statement of one initial-boundary-value problem."""

    name: str
    description: str
    internal_energy: InternalEnergy
    confinement: ConfinementPotential
    kernel: InteractionKernel
    domain: tuple[float, float]
    bc_kind: str
    initial_datum: Callable[[np.ndarray], np.ndarray]
    dirichlet_data: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    exact_solution: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    steady_state: Optional[Callable[[np.ndarray], np.ndarray]] = None
    suggested_t_final: float = 1.0
    suggested_n_cells: int = 64
    suggested_degree: int = 2

    def __post_init__(self):
        if self.bc_kind not in BC_KINDS:
            raise ValueError(f"unknown boundary kind {self.bc_kind!r}")
        if self.bc_kind == DIRICHLET and self.dirichlet_data is None:
            raise ValueError("Dirichlet problems need boundary data g(t, x)")
        if self.bc_kind == PERIODIC and not self.kernel.is_zero:
            raise ValueError(
                "periodic boundaries are only supported with a zero kernel "
                "(no periodic convolution wrapping is implemented)")

    def with_domain(self, a: float, b: float) -> "ProblemSpec":
        return replace(self, domain=(float(a), float(b)))


@dataclass
class SchemeParams:
    """Discretization parameters.

    beta0/beta1 weigh the jump and second-derivative terms of the diffusive
    interface flux; delta is the limiter floor.  cap_coef=None lets the
    driver pick a diffusive stability cap from the current state; a number
    fixes dt <= cap_coef * h^2 as-is.
    """

    beta0: float = 5.434
    beta1: float = 0.15
    delta: float = 1e-12
    degree: int = 2
    safety: float = 0.9
    cap_coef: float | None = None
    integrator: str = "rk3"  # "euler" | "rk3"
    n_gauss: int | None = None
    n_lobatto: int | None = None
    strict_energy: bool = False

    def __post_init__(self):
        if self.integrator not in ("euler", "rk3"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if not 0.0 < self.safety <= 1.0:
            raise ValueError(f"safety factor must be in (0, 1], got {self.safety}")


def default_params() -> SchemeParams:
    """Shared benchmark parameters; degree, mesh and integrator are the caller's."""
    return SchemeParams(beta0=5.434, beta1=0.15, delta=1e-12)


def beta0_lower_bound(k: int, beta1: float) -> float:
    """Smallest jump-penalty weight guaranteeing coercivity for degree k.

    2 k^2 (1 - beta1 (k^2-1) + beta1^2 (k^2-1)^2 / 3); callers may warn when
    the configured beta0 does not exceed it.
    """
    if k < 1:
        raise ValueError(f"bound defined for degree k >= 1, got {k}")
    s = k * k - 1.0
    return 2.0 * k * k * (1.0 - beta1 * s + (beta1 * beta1 / 3.0) * s * s)


def _gaussian(x, shift=0.0):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * (x - shift) ** 2) / math.sqrt(2.0 * math.pi)


def _porous_medium_steady(x):
    x = np.asarray(x, dtype=float)
    return np.maximum((3.0 / 8.0) ** (2.0 / 3.0) - 0.25 * x ** 2, 0.0)


def _aggregation_steady(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.maximum(2.0 - x ** 2, 0.0)) / math.pi


def _indicator(x, lo, hi):
    x = np.asarray(x, dtype=float)
    return np.where((x >= lo) & (x <= hi), 1.0, 0.0)


def example(example_id: int, variant: str | None = None, *,
            domain: tuple[float, float] | None = None,
            nu: float | None = None, m: float | None = None) -> ProblemSpec:
    """Benchmark problem by id (1..6).

    variant picks between alternative initial data where two are defined:
    example 4 takes "a2" (default) or "a3" for the indicator half-width,
    example 6 takes "centered" (default) or "shifted" for the Gaussian.
    nu/m override the power-law internal energy of examples 4 and 5.
    """
    if example_id == 1:
        if variant is not None:
            raise ValueError(f"example 1 has no variants (got {variant!r})")
        spec = ProblemSpec(
            name="heat",
            description="heat equation on [-pi, pi], exact solution 2 + e^-t sin x",
            internal_energy=entropy_energy(),
            confinement=zero_potential(),
            kernel=zero_kernel(),
            domain=(-math.pi, math.pi),
            bc_kind=PERIODIC,
            initial_datum=lambda x: 2.0 + np.sin(x),
            exact_solution=lambda t, x: 2.0 + math.exp(-t) * np.sin(x),
            steady_state=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
            suggested_t_final=0.1,
            suggested_n_cells=64,
            suggested_degree=2,
        )
    elif example_id == 2:
        if variant is not None:
            raise ValueError(f"example 2 has no variants (got {variant!r})")
        spec = ProblemSpec(
            name="porous-medium",
            description="porous medium with quadratic confinement on [-2, 2]",
            internal_energy=power_energy(nu=2.0, m=2.0),  # H(rho) = rho^2
            confinement=quadratic_potential(),
            kernel=zero_kernel(),
            domain=(-2.0, 2.0),
            bc_kind=PERIODIC,
            initial_datum=lambda x: np.maximum(1.0 - np.abs(x), 0.0),
            steady_state=_porous_medium_steady,
            suggested_t_final=32.0,
            suggested_n_cells=64,
            suggested_degree=3,
        )
    elif example_id == 3:
        if variant is not None:
            raise ValueError(f"example 3 has no variants (got {variant!r})")
        spec = ProblemSpec(
            name="attractive-repulsive",
            description="pure aggregation, kernel |x|^2/2 - ln|x|, Gaussian start",
            internal_energy=zero_energy(),
            confinement=zero_potential(),
            kernel=attractive_repulsive_kernel(),
            domain=(-4.0, 4.0),
            bc_kind=ZERO_FLUX,
            initial_datum=_gaussian,
            steady_state=_aggregation_steady,
            suggested_t_final=10.0,
            suggested_n_cells=128,
            suggested_degree=3,
        )
    elif example_id == 4:
        variant = variant or "a2"
        if variant not in ("a2", "a3"):
            raise ValueError(f"example 4 variant must be 'a2' or 'a3', got {variant!r}")
        a = 2.0 if variant == "a2" else 3.0
        spec = ProblemSpec(
            name=f"compact-attraction-{variant}",
            description=("nonlinear diffusion vs compact attraction -(1-|x|)+, "
                         f"indicator start of half-width {a:g}"),
            internal_energy=power_energy(nu=0.25 if nu is None else nu,
                                         m=3.0 if m is None else m),
            confinement=zero_potential(),
            kernel=compact_well_kernel(),
            domain=(-6.0, 6.0),
            bc_kind=ZERO_FLUX,
            initial_datum=lambda x, a=a: _indicator(x, -a, a) / (2.0 * a),
            suggested_t_final=30.0,
            suggested_n_cells=128,
            suggested_degree=2,
        )
        nu = m = None  # consumed
    elif example_id == 5:
        if variant is not None:
            raise ValueError(f"example 5 has no variants (got {variant!r})")
        spec = ProblemSpec(
            name="gaussian-attraction",
            description=("nonlinear diffusion vs Gaussian attraction "
                         "-exp(-|x|^2/4), three-block start of mass 1"),
            internal_energy=power_energy(nu=0.25 if nu is None else nu,
                                         m=3.0 if m is None else m),
            confinement=zero_potential(),
            kernel=gaussian_kernel(),
            domain=(-8.0, 8.0),
            bc_kind=ZERO_FLUX,
            initial_datum=lambda x: (_indicator(x, -5.0, -4.0)
                                     + _indicator(x, -2.0, 1.0)
                                     + _indicator(x, 3.0, 4.0)) / 5.0,
            suggested_t_final=600.0,
            suggested_n_cells=128,
            suggested_degree=2,
        )
        nu = m = None
    elif example_id == 6:
        variant = variant or "centered"
        if variant not in ("centered", "shifted"):
            raise ValueError(
                f"example 6 variant must be 'centered' or 'shifted', got {variant!r}")
        shift = 0.0 if variant == "centered" else 1.5
        spec = ProblemSpec(
            name=f"double-well-{variant}",
            description=("quadratic diffusion in an asymmetric double well, "
                         f"{variant} Gaussian start"),
            internal_energy=power_energy(nu=2.0, m=2.0),  # H(rho) = rho^2
            confinement=double_well_potential(),
            kernel=zero_kernel(),
            domain=(-4.0, 4.0),
            bc_kind=ZERO_FLUX,
            initial_datum=lambda x, s=shift: _gaussian(x, shift=s),
            suggested_t_final=10.0,
            suggested_n_cells=256,
            suggested_degree=2,
        )
    else:
        raise ValueError(f"unknown example id {example_id}; valid ids are 1..6")

    if nu is not None or m is not None:
        raise ValueError("nu/m overrides only apply to examples 4 and 5")
    if domain is not None:
        spec = spec.with_domain(*domain)
    return spec


def catalog() -> list[ProblemSpec]:
    return [example(i) for i in range(1, 7)]
