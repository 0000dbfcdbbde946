"""Uniform grids, active flux degrees of freedom and Simpson reconstructions.

Layout conventions
------------------
1D: ``averages[i]`` is the mean over ``[x_min + i dx, x_min + (i+1) dx]`` and
``points[k]`` is the value at ``x_min + k dx``. Periodic grids store ``N``
points (the right end duplicates ``points[0]``); far-field grids store
``N + 1``.

2D: ``face_x[k, j]`` sits at ``(x_min + k dx, y_j)`` on vertical faces,
``face_y[i, l]`` at ``(x_i, y_min + l dy)`` on horizontal faces, and
``corners[k, l]`` at ``(x_min + k dx, y_min + l dy)``.

Internally the scheme works on a *half grid*: node ``h`` along an axis sits at
``x_min + h dx / 2``; even nodes are interfaces and odd nodes are cell centers.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

# ghost half-grid nodes per side for non-periodic boundaries; must be even
PAD = 8

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class FarField:
    """Every ghost degree of freedom holds the constant ``value``."""

    value: float


BoundaryCondition = Union[Periodic, FarField]


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells <= 0:
            raise ValueError("n_cells must be positive")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def point_coords(self, bc: BoundaryCondition) -> np.ndarray:
        n = self.n_cells if isinstance(bc, Periodic) else self.n_cells + 1
        return self.x_min + np.arange(n) * self.dx

    def half_grid_coords(self, bc: BoundaryCondition) -> np.ndarray:
        if isinstance(bc, Periodic):
            h = np.arange(2 * self.n_cells)
        else:
            h = np.arange(-PAD, 2 * self.n_cells + 1 + PAD)
        return self.x_min + h * (0.5 * self.dx)


@dataclass(frozen=True)
class Grid2D:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x <= 0 or self.n_y <= 0:
            raise ValueError("cell counts must be positive")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / self.n_y

    @property
    def x_axis(self) -> Grid1D:
        return Grid1D(self.x_min, self.x_max, self.n_x)

    @property
    def y_axis(self) -> Grid1D:
        return Grid1D(self.y_min, self.y_max, self.n_y)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def half_grid_coords(self, bc: BoundaryCondition) -> tuple[np.ndarray, np.ndarray]:
        x = self.x_axis.half_grid_coords(bc)
        y = self.y_axis.half_grid_coords(bc)
        return np.meshgrid(x, y, indexing="ij")


class _StateArithmetic:
    """Elementwise linear combinations, enough for Runge-Kutta stages."""

    def _map(self, fn, *others):
        kw = {}
        for f in dataclasses.fields(self):
            kw[f.name] = fn(getattr(self, f.name), *(getattr(o, f.name) for o in others))
        return type(self)(**kw)

    def __add__(self, other):
        return self._map(np.add, other)

    def __sub__(self, other):
        return self._map(np.subtract, other)

    def __mul__(self, scalar):
        return self._map(lambda a: a * scalar)

    __rmul__ = __mul__

    def arrays(self) -> list[np.ndarray]:
        return [getattr(self, f.name) for f in dataclasses.fields(self)]

    def copy(self):
        return self._map(np.copy)

    def min(self) -> float:
        return min(float(np.min(a.real)) for a in self.arrays())

    def max(self) -> float:
        return max(float(np.max(a.real)) for a in self.arrays())

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(a))) for a in self.arrays())


@dataclass
class AFState1D(_StateArithmetic):
    averages: np.ndarray
    points: np.ndarray

    def check(self, grid: Grid1D, bc: BoundaryCondition) -> None:
        n = grid.n_cells
        want = n if isinstance(bc, Periodic) else n + 1
        if self.averages.shape != (n,) or self.points.shape != (want,):
            raise ValueError(
                f"state shapes {self.averages.shape}/{self.points.shape} do not match grid ({n},)/({want},)"
            )


@dataclass
class AFState2D(_StateArithmetic):
    averages: np.ndarray
    face_x: np.ndarray
    face_y: np.ndarray
    corners: np.ndarray

    def check(self, grid: Grid2D, bc: BoundaryCondition) -> None:
        e = 0 if isinstance(bc, Periodic) else 1
        nx, ny = grid.n_x, grid.n_y
        want = {
            "averages": (nx, ny),
            "face_x": (nx + e, ny),
            "face_y": (nx, ny + e),
            "corners": (nx + e, ny + e),
        }
        for name, shape in want.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")


def cell_center_value_1d(avg, left_pt, right_pt):
    """Cell-centered value implied by Simpson's rule on one cell.

    Same as (6 avg - left - right) / 4, written so constants come out exactly.
    """
    return avg + ((avg - left_pt) + (avg - right_pt)) / 4.0


def cell_center_value_2d(avg, face_pts, corner_pts):
    """Tensor-product Simpson version; ``face_pts``/``corner_pts`` are the four
    face-centered and four corner values (any order)."""
    face_dev = np.sum(avg - np.asarray(face_pts), axis=0)
    corner_dev = np.sum(avg - np.asarray(corner_pts), axis=0)
    return avg + (4.0 * face_dev + corner_dev) / 16.0


def simpson_face_flux(end_a, mid, end_b):
    return (end_a + 4.0 * mid + end_b) / 6.0


# --------------------------------------------------------------------------
# half-grid assembly

def half_grid_1d(averages, points, bc: BoundaryCondition):
    """Interleave points and reconstructed centers; returns ``(u, avg)``.

    ``avg`` carries the cell averages on the odd nodes (zero elsewhere) and
    is padded the same way as ``u``.
    """
    n = averages.shape[0]
    dtype = np.result_type(averages, points, float)
    if isinstance(bc, Periodic):
        u = np.zeros(2 * n, dtype=dtype)
    else:
        u = np.zeros(2 * n + 1, dtype=dtype)
    avg = np.zeros_like(u)
    u[0::2] = points
    avg[1::2] = averages
    if isinstance(bc, FarField):
        u = np.pad(u, PAD, constant_values=bc.value)
        avg = np.pad(avg, PAD, constant_values=bc.value)
    u[1::2] = centers_from_half_grid_1d(avg, u)[1::2]
    return u, avg


def centers_from_half_grid_1d(avg, values):
    return cell_center_value_1d(avg, np.roll(values, 1), np.roll(values, -1))


def half_grid_2d(state: AFState2D, bc: BoundaryCondition):
    nx, ny = state.averages.shape
    e = 0 if isinstance(bc, Periodic) else 1
    dtype = np.result_type(*state.arrays(), float)
    u = np.zeros((2 * nx + e, 2 * ny + e), dtype=dtype)
    avg = np.zeros_like(u)
    u[0::2, 1::2] = state.face_x
    u[1::2, 0::2] = state.face_y
    u[0::2, 0::2] = state.corners
    avg[1::2, 1::2] = state.averages
    if isinstance(bc, FarField):
        u = np.pad(u, PAD, constant_values=bc.value)
        avg = np.pad(avg, PAD, constant_values=bc.value)
    u[1::2, 1::2] = centers_from_half_grid_2d(avg, u)[1::2, 1::2]
    return u, avg


def centers_from_half_grid_2d(avg, values):
    # (36 avg - 4 faces - corners) / 16 as deviations from avg; the grouping
    # makes transposed input give bitwise transposed output
    d = lambda shift: avg - np.roll(values, shift, (0, 1))
    faces = (d((1, 0)) + d((-1, 0))) + (d((0, 1)) + d((0, -1)))
    corners = (d((1, 1)) + d((-1, -1))) + (d((1, -1)) + d((-1, 1)))
    return avg + (4.0 * faces + corners) / 16.0


def crop(arr, bc: BoundaryCondition):
    if isinstance(bc, Periodic):
        return arr
    if arr.ndim == 1:
        return arr[PAD:-PAD]
    return arr[PAD:-PAD, PAD:-PAD]


def split_half_grid_2d(arr):
    """Return (centers, face_x, face_y, corners) views of a cropped half grid."""
    return arr[1::2, 1::2], arr[0::2, 1::2], arr[1::2, 0::2], arr[0::2, 0::2]


# --------------------------------------------------------------------------
# initial projection

# each cell is split into SUBCELLS pieces per direction, each with a 5-point rule
SUBCELLS = 2
_SUB_NODES = (
    (np.arange(SUBCELLS)[:, None] + 0.5 * (1.0 + _GL_NODES[None, :])) / SUBCELLS * 2.0 - 1.0
).ravel()
_SUB_WEIGHTS = np.tile(_GL_WEIGHTS, SUBCELLS) / SUBCELLS


def _gauss_average_1d(u0, grid: Grid1D):
    half = 0.5 * grid.dx
    x = grid.centers[:, None] + half * _SUB_NODES[None, :]
    vals = np.asarray(u0(x), dtype=float) * np.ones_like(x)
    # deviations from one node keep constants exact to the last bit
    ref = vals[:, :1]
    return ref[:, 0] + 0.5 * np.sum(_SUB_WEIGHTS * (vals - ref), axis=1)


def _gauss_average_2d(u0, grid: Grid2D):
    xc = grid.x_axis.centers
    yc = grid.y_axis.centers
    k = _SUB_NODES.size
    x = xc[:, None, None, None] + 0.5 * grid.dx * _SUB_NODES[None, None, :, None]
    y = yc[None, :, None, None] + 0.5 * grid.dy * _SUB_NODES[None, None, None, :]
    vals = np.asarray(u0(x, y), dtype=float)
    vals = np.broadcast_to(vals, (xc.size, yc.size, k, k))
    w = np.outer(_SUB_WEIGHTS, _SUB_WEIGHTS)
    ref = vals[:, :, :1, :1]
    return ref[:, :, 0, 0] + 0.25 * np.sum((vals - ref) * w, axis=(2, 3))


def cell_means_1d(fn: Callable, grid: Grid1D) -> np.ndarray:
    """Composite five-point Gauss-Legendre cell means (also the error-norm oracle)."""
    return _gauss_average_1d(fn, grid)


def cell_means_2d(fn: Callable, grid: Grid2D) -> np.ndarray:
    return _gauss_average_2d(fn, grid)


def project_initial(grid, u0: Callable, bc: BoundaryCondition):
    """Sample ``u0`` at every point DoF and average it over every cell."""
    if isinstance(grid, Grid1D):
        xp = grid.point_coords(bc)
        state = AFState1D(_gauss_average_1d(u0, grid), np.asarray(u0(xp), dtype=float) * np.ones_like(xp))
    else:
        xe = grid.x_axis.point_coords(bc)
        ye = grid.y_axis.point_coords(bc)
        xc = grid.x_axis.centers
        yc = grid.y_axis.centers

        def sample(xs, ys):
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            return np.broadcast_to(np.asarray(u0(X, Y), dtype=float), X.shape).copy()

        state = AFState2D(
            _gauss_average_2d(u0, grid),
            sample(xe, yc),
            sample(xc, ye),
            sample(xe, ye),
        )
    if not state.is_finite():
        raise ValueError("initial data produced non-finite values")
    return state
