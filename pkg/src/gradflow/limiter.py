"""Positivity-preserving scaling limiter.

Cells whose polynomial dips below the floor delta are linearly rescaled
about their (untouched) average so the new minimum sits at delta.  The
minimum is the true polynomial minimum: endpoint values plus the real
critical points, closed-form for degree <= 3 and companion-matrix roots
above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg

from .meshbasis import (DGField, GradflowError, cell_averages,
                        legendre_to_monomial)

SQRT2 = math.sqrt(2.0)
_BIG = np.inf


@dataclass(frozen=True)
class LimiterReport:
    cells_modified: int
    worst_min_before: float
    theta_min: float
    cells_failed: tuple[int, ...] = ()
    cells_flattened: int = 0


class LimiterError(GradflowError):
    """Some cell average sits below the floor; limiting cannot proceed."""

    def __init__(self, message: str, report: LimiterReport):
        super().__init__(message)
        self.report = report


def _critical_values_k2(mono: np.ndarray) -> np.ndarray:
    """Interior critical value of each quadratic, +inf where there is none."""
    a1, a2 = mono[:, 1], mono[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        x = -a1 / (2.0 * a2)
    ok = np.isfinite(x) & (np.abs(x) < 1.0)
    x = np.where(ok, x, 0.0)
    val = mono[:, 0] + x * (a1 + x * a2)
    return np.where(ok, val, _BIG)


def _critical_values_k3(mono: np.ndarray) -> np.ndarray:
    """Minimum over interior critical points of each cubic, +inf where none."""
    c, b, a = mono[:, 1], 2.0 * mono[:, 2], 3.0 * mono[:, 3]
    out = np.full(mono.shape[0], _BIG)
    cubic = np.abs(a) > 1e-300
    # derivative genuinely quadratic: stable two-root formula
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - 4.0 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        qq = -0.5 * (b + np.sign(b) * sq)
        qq = np.where(b == 0.0, -0.5 * sq, qq)
        r1 = np.where(cubic, qq / a, _BIG)
        r2 = np.where(cubic & (np.abs(qq) > 1e-300), c / qq, _BIG)
        rl = np.where(~cubic, -c / b, _BIG)  # derivative linear
    has_disc = disc >= 0.0
    for roots, extra_ok in ((r1, has_disc & cubic), (r2, has_disc & cubic),
                            (rl, ~cubic & (np.abs(b) > 1e-300))):
        ok = extra_ok & np.isfinite(roots) & (np.abs(roots) < 1.0)
        x = np.where(ok, roots, 0.0)
        val = mono[:, 0] + x * (mono[:, 1] + x * (mono[:, 2] + x * mono[:, 3]))
        out = np.where(ok, np.minimum(out, val), out)
    return out


def _interior_min_generic(coeffs: np.ndarray, degree: int) -> np.ndarray:
    """Per-cell interior critical minimum via Legendre companion roots."""
    out = np.full(coeffs.shape[0], _BIG)
    norms = np.sqrt((2.0 * np.arange(degree + 1) + 1.0) / 2.0)
    for i, row in enumerate(coeffs):
        c = row * norms
        d = npleg.legder(c)
        d = npleg.legtrim(d, tol=1e-14 * max(1.0, float(np.abs(d).max(initial=0.0))))
        if d.size <= 1:
            continue
        roots = npleg.legroots(d)
        roots = roots[np.abs(roots.imag) < 1e-10].real if np.iscomplexobj(roots) \
            else roots
        roots = roots[np.abs(roots) < 1.0]
        if roots.size == 0:
            continue
        d2 = npleg.legder(d)
        for _ in range(2):  # Newton polish of the critical points
            dp = npleg.legval(roots, d)
            dpp = npleg.legval(roots, d2)
            step = np.where(np.abs(dpp) > 1e-300, dp / np.where(dpp == 0, 1, dpp), 0.0)
            roots = np.clip(roots - step, -1.0, 1.0)
        out[i] = float(np.min(npleg.legval(roots, c)))
    return out


def cell_mins(field: DGField) -> np.ndarray:
    """Exact minimum of each cell polynomial over the closed cell."""
    coeffs = field.coeffs
    b = field.basis
    mins = np.minimum(coeffs @ b.phi_left, coeffs @ b.phi_right)
    k = field.degree
    if k < 2:
        return mins
    if k <= 3:
        mono = coeffs @ legendre_to_monomial(k, orthonormal=True)
        interior = _critical_values_k2(mono) if k == 2 else _critical_values_k3(mono)
    else:
        interior = _interior_min_generic(coeffs, k)
    return np.minimum(mins, interior)


def cell_min(field: DGField, cell: int) -> float:
    n = field.mesh.n_cells
    if not -n <= cell < n:
        raise IndexError(f"cell index {cell} out of range for {n} cells")
    sub = DGField(field.mesh, field.basis, field.coeffs[cell][None, :])
    return float(cell_mins(sub)[0])


def field_min(field: DGField) -> float:
    return float(cell_mins(field).min())


def _scale_cells(coeffs: np.ndarray, mask: np.ndarray, avgs: np.ndarray,
                 mins: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, float]:
    """Rescale masked cells about their average so the minimum hits target."""
    theta = (avgs[mask] - target[mask]) / (avgs[mask] - mins[mask])
    out = coeffs.copy()
    out[mask, 0] = SQRT2 * avgs[mask] * (1.0 - theta) + theta * coeffs[mask, 0]
    out[mask, 1:] = theta[:, None] * coeffs[mask, 1:]
    return out, float(theta.min())


def _trigger(mins: np.ndarray, avgs: np.ndarray, target) -> np.ndarray:
    # slack keeps the limiter idempotent under roundoff in the rescaling
    slack = 1e-14 * np.maximum(1.0, np.abs(avgs))
    return mins < target - slack


def apply_limiter(field: DGField, delta: float) -> tuple[DGField, LimiterReport]:
    """Lift every cell minimum to >= delta without touching cell averages.

    Cells whose average already sits below delta cannot be fixed without
    fabricating mass; they are reported in cells_failed and the call raises.
    """
    avgs = cell_averages(field)
    mins = cell_mins(field)
    worst = float(mins.min()) if mins.size else 0.0
    failed = np.flatnonzero(avgs < delta)
    if failed.size:
        report = LimiterReport(0, worst, 1.0, tuple(int(i) for i in failed))
        raise LimiterError(
            f"{failed.size} cell average(s) below the floor {delta:g} "
            f"(first: cell {failed[0]}, average {avgs[failed[0]]:.3e})", report)
    mask = _trigger(mins, avgs, delta)
    if not mask.any():
        return field, LimiterReport(0, worst, 1.0)
    target = np.full_like(avgs, delta)
    coeffs, theta_min = _scale_cells(field.coeffs, mask, avgs, mins, target)
    return field.with_coeffs(coeffs), LimiterReport(
        int(mask.sum()), worst, theta_min)


def limit_with_fallback(field: DGField, delta: float) \
        -> tuple[DGField, LimiterReport, bool]:
    """Driver-side limiting: flatten cells whose average sits in (0, delta).

    Such cells cannot reach the floor delta, so they are rescaled to a
    constant equal to their (positive) average, and the caller is told to
    use the corrected-flux scheme for the step.  Negative averages are a
    hard error.
    """
    avgs = cell_averages(field)
    mins = cell_mins(field)
    worst = float(mins.min()) if mins.size else 0.0
    if avgs.size and float(avgs.min()) <= 0.0:
        bad = int(np.argmin(avgs))
        raise LimiterError(
            f"nonpositive cell average {avgs[bad]:.3e} in cell {bad}",
            LimiterReport(0, worst, 1.0, (bad,)))
    low = avgs < delta
    target = np.where(low, avgs, delta)
    mask = _trigger(mins, avgs, target)
    if not mask.any():
        return field, LimiterReport(0, worst, 1.0), bool(low.any())
    coeffs, theta_min = _scale_cells(field.coeffs, mask, avgs, mins, target)
    report = LimiterReport(int(mask.sum()), worst, theta_min,
                           cells_flattened=int((mask & low).sum()))
    return field.with_coeffs(coeffs), report, bool(low.any())
