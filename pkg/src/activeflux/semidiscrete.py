"""Semi-discrete active flux right-hand sides for u_t = div(A grad u).

The auxiliary gradient q = grad u is never stored: it is rebuilt from the u
degrees of freedom at every evaluation, on the same half grid as u.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .mesh import (
    AFState1D,
    AFState2D,
    BoundaryCondition,
    Grid1D,
    Grid2D,
    Periodic,
    centers_from_half_grid_1d,
    centers_from_half_grid_2d,
    crop,
    half_grid_1d,
    half_grid_2d,
    split_half_grid_2d,
)
from .operators import SchemeVariant, apply_on_half_grid, variant_stencils


# --------------------------------------------------------------------------
# coefficients

@dataclass(frozen=True)
class ConstScalar:
    a: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("diffusion coefficient must be nonnegative")


@dataclass(frozen=True)
class ConstMatrix:
    A: tuple

    def __post_init__(self):
        M = np.asarray(self.A, dtype=float)
        if M.shape != (2, 2):
            raise ValueError("diffusion matrix must be 2x2")
        if not np.allclose(M, M.T, rtol=0, atol=1e-14 * max(1.0, np.abs(M).max())):
            raise ValueError("diffusion matrix must be symmetric")
        if np.linalg.eigvalsh(M).min() < -1e-14 * max(1.0, np.abs(M).max()):
            raise ValueError("diffusion matrix must be positive semi-definite")
        object.__setattr__(self, "A", tuple(map(tuple, M)))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.A, dtype=float)


@dataclass(frozen=True)
class FieldMatrix:
    """Spatially varying matrix; ``fn(x, y)`` returns an array of shape ``x.shape + (2, 2)``."""

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PmePower:
    """Porous medium coefficient a(u) = m u^(m-1), evaluated at max(u, 0)."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError("porous medium exponent must be an integer >= 2")

    def a(self, u):
        return self.m * np.maximum(np.real(u), 0.0) ** (self.m - 1)


Coefficient = Union[ConstScalar, ConstMatrix, FieldMatrix, PmePower]


def scalar_coefficient(coeff, u_half):
    if isinstance(coeff, ConstScalar):
        return coeff.a
    if isinstance(coeff, PmePower):
        return coeff.a(u_half)
    raise TypeError(f"{type(coeff).__name__} is not a 1D coefficient")


def matrix_coefficient(coeff, u_half, coords):
    """Return (a11, a12, a21, a22), each scalar or half-grid shaped."""
    if isinstance(coeff, ConstScalar):
        return coeff.a, 0.0, 0.0, coeff.a
    if isinstance(coeff, ConstMatrix):
        M = coeff.matrix
        return M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    if isinstance(coeff, PmePower):
        a = coeff.a(u_half)
        return a, 0.0, 0.0, a
    if isinstance(coeff, FieldMatrix):
        M = np.asarray(coeff.fn(*coords), dtype=float)
        return M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
    raise TypeError(f"unsupported coefficient {coeff!r}")


def spectral_radius_field(coeff, u_half, coords) -> float:
    """Largest eigenvalue of A over every half-grid node."""
    a11, a12, a21, a22 = (np.asarray(v, dtype=float) for v in matrix_coefficient(coeff, u_half, coords))
    tr = 0.5 * (a11 + a22)
    disc = np.sqrt(np.maximum((0.5 * (a11 - a22)) ** 2 + 0.25 * (a12 + a21) ** 2, 0.0))
    return float(np.max(tr + disc))


# --------------------------------------------------------------------------
# right-hand sides

@dataclass
class Rhs1D:
    d_averages: np.ndarray
    d_points: np.ndarray
    high_order_fluxes: np.ndarray  # (a q) at every point DoF

    def as_state(self) -> AFState1D:
        return AFState1D(self.d_averages, self.d_points)


@dataclass
class Rhs2D:
    d_averages: np.ndarray
    d_face_x: np.ndarray
    d_face_y: np.ndarray
    d_corners: np.ndarray
    flux_x: np.ndarray  # Simpson-averaged x-flux on vertical faces (face_x layout)
    flux_y: np.ndarray  # Simpson-averaged y-flux on horizontal faces (face_y layout)

    def as_state(self) -> AFState2D:
        return AFState2D(self.d_averages, self.d_face_x, self.d_face_y, self.d_corners)


def _q_half_grid_1d(u, dx, stencil):
    q = apply_on_half_grid(stencil, u, dx)
    qbar = (np.roll(u, -1) - np.roll(u, 1)) / dx
    q[1::2] = centers_from_half_grid_1d(qbar, q)[1::2]
    return q


def q_points_1d(state: AFState1D, grid: Grid1D, bc: BoundaryCondition = Periodic(),
                variant=SchemeVariant.CENTRAL4) -> np.ndarray:
    """Gradient q = u_x at every point DoF."""
    dq, _ = variant_stencils(variant)
    u, _ = half_grid_1d(state.averages, state.points, bc)
    return crop(_q_half_grid_1d(u, grid.dx, dq), bc)[0::2]


def rhs_1d(state: AFState1D, coeff, grid: Grid1D, bc: BoundaryCondition = Periodic(),
           variant=SchemeVariant.CENTRAL4) -> Rhs1D:
    dq, du = variant_stencils(variant)
    dx = grid.dx
    u, _ = half_grid_1d(state.averages, state.points, bc)
    q = _q_half_grid_1d(u, dx, dq)
    f = scalar_coefficient(coeff, u) * q

    d_pts = apply_on_half_grid(du, f, dx)
    d_avg = (np.roll(f, -1) - np.roll(f, 1)) / dx
    f, d_pts, d_avg = (crop(v, bc) for v in (f, d_pts, d_avg))
    return Rhs1D(d_avg[1::2], d_pts[0::2], f[0::2])


def _simpson(values, axis):
    return (np.roll(values, 1, axis) + 4.0 * values + np.roll(values, -1, axis)) / 6.0


def rhs_2d(state: AFState2D, coeff, grid: Grid2D, bc: BoundaryCondition = Periodic(),
           variant=SchemeVariant.CENTRAL4) -> Rhs2D:
    dq, du = variant_stencils(variant)
    dx, dy = grid.dx, grid.dy
    u, _ = half_grid_2d(state, bc)

    # gradients at faces and corners, then cell-centered via tensor Simpson
    q1 = apply_on_half_grid(dq, u, dx, axis=0)
    q2 = apply_on_half_grid(dq, u, dy, axis=1)
    u_fx = _simpson(u, 1)
    u_fy = _simpson(u, 0)
    qbar1 = (np.roll(u_fx, -1, 0) - np.roll(u_fx, 1, 0)) / dx
    qbar2 = (np.roll(u_fy, -1, 1) - np.roll(u_fy, 1, 1)) / dy
    q1[1::2, 1::2] = centers_from_half_grid_2d(qbar1, q1)[1::2, 1::2]
    q2[1::2, 1::2] = centers_from_half_grid_2d(qbar2, q2)[1::2, 1::2]

    coords = grid.half_grid_coords(bc) if not isinstance(coeff, (ConstScalar, ConstMatrix, PmePower)) else None
    a11, a12, a21, a22 = matrix_coefficient(coeff, u, coords)
    f1 = a11 * q1 + a12 * q2
    f2 = a21 * q1 + a22 * q2

    d_pts = apply_on_half_grid(du, f1, dx, axis=0) + apply_on_half_grid(du, f2, dy, axis=1)
    flux_x = _simpson(f1, 1)
    flux_y = _simpson(f2, 0)
    d_avg = (
        (np.roll(flux_x, -1, 0) - np.roll(flux_x, 1, 0)) / dx
        + (np.roll(flux_y, -1, 1) - np.roll(flux_y, 1, 1)) / dy
    )
    d_pts, d_avg, flux_x, flux_y = (crop(v, bc) for v in (d_pts, d_avg, flux_x, flux_y))
    _, d_fx, d_fy, d_c = split_half_grid_2d(d_pts)
    return Rhs2D(
        d_avg[1::2, 1::2],
        d_fx,
        d_fy,
        d_c,
        flux_x[0::2, 1::2],
        flux_y[1::2, 0::2],
    )


def rhs(state, coeff, grid, bc: BoundaryCondition = Periodic(), variant=SchemeVariant.CENTRAL4):
    if isinstance(grid, Grid1D):
        return rhs_1d(state, coeff, grid, bc, variant)
    return rhs_2d(state, coeff, grid, bc, variant)
