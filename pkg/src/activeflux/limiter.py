"""Positivity-preserving limiting for forward-Euler stages.

Cell averages use a parametrised flux limiter: each interface flux is the
convex blend ``theta * high + (1 - theta) * low`` of the high-order active
flux and a first-order positive flux, with one ``theta`` per interface so the
update stays conservative. Point values are clipped at zero afterwards.

Interface arrays here always have one entry more than the cells along the
limited axis: entry ``k`` is the left face of cell ``k`` and entry ``N`` the
right face of the last cell.
"""
from __future__ import annotations

import numpy as np

from .mesh import AFState1D, AFState2D, BoundaryCondition, Grid1D, Grid2D, Periodic

GUARD = 1e-12
NEGATIVE_TOLERANCE = 1e-15


class PositivityError(RuntimeError):
    """A limited average came out negative, i.e. the time step broke the low-order bound."""


def low_order_flux_1d(avg_left, avg_right, a_at_interface, dx):
    return a_at_interface * (avg_right - avg_left) / dx


def lambda_candidates(u_bar_low, H):
    """Per-direction limiter bounds for one or many cells.

    ``H`` stacks the anti-diffusive fluxes along axis 0 (L, R or L, R, D, U).
    """
    H = np.asarray(H, dtype=float)
    neg = np.sum(np.minimum(H, 0.0), axis=0)
    cand = np.clip(u_bar_low / (GUARD - neg), 0.0, 1.0)
    return np.where(H < 0.0, cand, 1.0)


def blend_thetas(lam_right_of_left_cell, lam_left_of_right_cell):
    """theta at an interface: the smaller of the two facing candidates."""
    return np.minimum(lam_right_of_left_cell, lam_left_of_right_cell)


def clip_points(points):
    return np.maximum(points, 0.0)


def _extend(arr, bc: BoundaryCondition, axis: int):
    """Interface layout: periodic arrays get their first face appended."""
    if isinstance(bc, Periodic):
        first = np.take(arr, [0], axis=axis)
        return np.concatenate([arr, first], axis=axis)
    return arr


def _pad_cells(avg, bc: BoundaryCondition, axis: int):
    """Cell averages with one neighbour cell on each side along ``axis``."""
    if isinstance(bc, Periodic):
        lo = np.take(avg, [-1], axis=axis)
        hi = np.take(avg, [0], axis=axis)
    else:
        shape = list(avg.shape)
        shape[axis] = 1
        lo = hi = np.full(shape, bc.value)
    return np.concatenate([lo, avg, hi], axis=axis)


def _thetas_along(lam_low, lam_high, bc: BoundaryCondition, axis: int):
    """Interface thetas from per-cell (left/down, right/up) candidates."""
    n = lam_low.shape[axis]
    left = np.take(lam_high, np.arange(-1, n), axis=axis, mode="wrap")   # cell k-1, right face
    right = np.take(lam_low, np.arange(0, n + 1), axis=axis, mode="wrap")  # cell k, left face
    theta = blend_thetas(left, right)
    if not isinstance(bc, Periodic):
        first = [slice(None)] * theta.ndim
        last = [slice(None)] * theta.ndim
        first[axis] = 0
        last[axis] = n
        theta[tuple(first)] = np.take(lam_low, 0, axis=axis)
        theta[tuple(last)] = np.take(lam_high, n - 1, axis=axis)
    return theta


def apply_limited_fluxes(averages, high_fluxes, low_fluxes, thetas, dt, spacing):
    """Euler update of the averages with fluxes ``theta * high + (1 - theta) * low``."""
    new = averages.copy()
    for axis, (hf, lf, theta, h) in enumerate(zip(high_fluxes, low_fluxes, thetas, spacing)):
        limited = theta * hf + (1.0 - theta) * lf
        n = averages.shape[axis]
        lo = [slice(None)] * averages.ndim
        hi = [slice(None)] * averages.ndim
        lo[axis] = slice(0, n)
        hi[axis] = slice(1, n + 1)
        new = new + dt / h * (limited[tuple(hi)] - limited[tuple(lo)])
    return new


def limited_average_update(averages, high_fluxes, low_fluxes, dt, spacing, bc=Periodic()):
    """Limited forward-Euler update of the averages.

    ``high_fluxes``/``low_fluxes`` are sequences with one interface array per
    axis; ``spacing`` the matching cell widths. Returns ``(new_averages,
    thetas)``.
    """
    low_update = averages.copy()
    H_lo, H_hi = [], []
    for axis, (hf, lf, h) in enumerate(zip(high_fluxes, low_fluxes, spacing)):
        n = averages.shape[axis]
        lo = [slice(None)] * averages.ndim
        hi = [slice(None)] * averages.ndim
        lo[axis] = slice(0, n)
        hi[axis] = slice(1, n + 1)
        lo, hi = tuple(lo), tuple(hi)
        low_update = low_update + dt / h * (lf[hi] - lf[lo])
        H_lo.append(-dt / h * (hf[lo] - lf[lo]))
        H_hi.append(dt / h * (hf[hi] - lf[hi]))
    lam = lambda_candidates(low_update, H_lo + H_hi)
    ndim = averages.ndim
    thetas = [_thetas_along(lam[axis], lam[ndim + axis], bc, axis) for axis in range(ndim)]
    new = apply_limited_fluxes(averages, high_fluxes, low_fluxes, thetas, dt, spacing)
    scale = max(1.0, float(np.max(np.abs(averages))))
    if np.min(new) < -NEGATIVE_TOLERANCE * scale:
        raise PositivityError(
            f"limited average {np.min(new):.3e} < 0; low-order minimum {np.min(low_update):.3e}"
        )
    return new, thetas


def low_order_fluxes_1d(state: AFState1D, a_fn, grid: Grid1D, bc: BoundaryCondition):
    a_face = a_fn(_extend(state.points, bc, 0))
    ext = _pad_cells(state.averages, bc, 0)
    return low_order_flux_1d(ext[:-1], ext[1:], a_face, grid.dx)


def low_order_fluxes_2d(state: AFState2D, a_fn, grid: Grid2D, bc: BoundaryCondition):
    ax = a_fn(_extend(state.face_x, bc, 0))
    ay = a_fn(_extend(state.face_y, bc, 1))
    ex = _pad_cells(state.averages, bc, 0)
    ey = _pad_cells(state.averages, bc, 1)
    fx = low_order_flux_1d(ex[:-1, :], ex[1:, :], ax, grid.dx)
    fy = low_order_flux_1d(ey[:, :-1], ey[:, 1:], ay, grid.dy)
    return fx, fy


def pp_time_step_bound(state, a_fn, grid, bc: BoundaryCondition = Periodic()) -> float:
    """Largest dt for which the first-order scheme is positivity preserving."""
    if isinstance(grid, Grid1D):
        amax = float(np.max(a_fn(state.points)))
        return np.inf if amax == 0 else grid.dx**2 / (2.0 * amax)
    ax = a_fn(_extend(state.face_x, bc, 0))
    ay = a_fn(_extend(state.face_y, bc, 1))
    load = (ax[:-1, :] + ax[1:, :]) / grid.dx**2 + (ay[:, :-1] + ay[:, 1:]) / grid.dy**2
    peak = float(np.max(load))
    return np.inf if peak == 0 else 1.0 / peak


class PositivityLimiter:
    """Stage hook: turns a high-order Euler stage into a positive one."""

    def __init__(self, a_fn, grid, bc: BoundaryCondition = Periodic()):
        self.a_fn = a_fn
        self.grid = grid
        self.bc = bc
        self.last_thetas = None

    def __call__(self, state, rhs, dt):
        grid, bc = self.grid, self.bc
        if isinstance(grid, Grid1D):
            low = low_order_fluxes_1d(state, self.a_fn, grid, bc)
            high = _extend(rhs.high_order_fluxes, bc, 0)
            avg, self.last_thetas = limited_average_update(state.averages, [high], [low], dt, [grid.dx], bc)
            return AFState1D(avg, clip_points(state.points + dt * rhs.d_points))
        lx, ly = low_order_fluxes_2d(state, self.a_fn, grid, bc)
        hx = _extend(rhs.flux_x, bc, 0)
        hy = _extend(rhs.flux_y, bc, 1)
        avg, self.last_thetas = limited_average_update(
            state.averages, [hx, hy], [lx, ly], dt, [grid.dx, grid.dy], bc
        )
        return AFState2D(
            avg,
            clip_points(state.face_x + dt * rhs.d_face_x),
            clip_points(state.face_y + dt * rhs.d_face_y),
            clip_points(state.corners + dt * rhs.d_corners),
        )
