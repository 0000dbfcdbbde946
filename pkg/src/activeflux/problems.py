"""Benchmark problems, exact solutions, error norms and convergence studies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .mesh import (
    FarField,
    Grid1D,
    Grid2D,
    Periodic,
    cell_means_1d,
    cell_means_2d,
    project_initial,
)
from .operators import SchemeVariant
from .semidiscrete import ConstMatrix, ConstScalar, FieldMatrix, PmePower
from .timestepping import InstabilityError, RkScheme, StepControl, advance

HEAT_1D_A = 0.05
HEAT_2D_A = ((0.02, 0.01), (0.01, 0.04))


# --------------------------------------------------------------------------
# exact solutions and initial data

def exact_heat_1d(x, t, a: float = HEAT_1D_A):
    return np.exp(-4.0 * np.pi**2 * a * t) * np.sin(2.0 * np.pi * np.asarray(x))


def exact_heat_2d(x, y, t, A=HEAT_2D_A):
    rate = sum(sum(row) for row in A)
    return np.exp(-4.0 * np.pi**2 * rate * t) * np.sin(2.0 * np.pi * (np.asarray(x) + np.asarray(y)))


def barenblatt(gamma: float, m: int, x, t: float):
    alpha = 1.0 / (m + 1)
    bracket = gamma - alpha * (m - 1) / (2.0 * m) * np.asarray(x, dtype=float) ** 2 / t ** (2 * alpha)
    return t**-alpha * np.maximum(bracket, 0.0) ** (1.0 / (m - 1))


def barenblatt_support_edge(gamma: float, m: int, t: float) -> float:
    alpha = 1.0 / (m + 1)
    return math.sqrt(gamma * 2.0 * m * t ** (2 * alpha) / (alpha * (m - 1)))


def ring_field(x, y):
    """b b^T with b = (-y, x) / r; taken as zero at the origin."""
    r = np.hypot(x, y)
    safe = np.where(r > 0, r, 1.0)
    bx = np.where(r > 0, -y / safe, 0.0)
    by = np.where(r > 0, x / safe, 0.0)
    out = np.empty(np.shape(x) + (2, 2))
    out[..., 0, 0] = bx * bx
    out[..., 0, 1] = bx * by
    out[..., 1, 0] = bx * by
    out[..., 1, 1] = by * by
    return out


def ring_initial(x, y):
    return 0.1 + 10.0 * np.exp(-((x - 0.6) ** 2 + y**2) / 0.02)


def two_boxes_equal(x):
    x = np.asarray(x, dtype=float)
    inside = ((x > -3.7) & (x < -0.7)) | ((x > 0.7) & (x < 3.7))
    return np.where(inside, 1.0, 0.0)


def two_boxes_unequal(x):
    x = np.asarray(x, dtype=float)
    return np.where((x > -4) & (x < -1), 1.0, 0.0) + np.where((x > 0) & (x < 3), 2.0, 0.0)


def waiting_time_initial(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < np.pi / 2, np.cos(np.clip(x, -np.pi / 2, np.pi / 2)), 0.0)


def _bump(r2):
    gap = 6.0 - r2
    return np.where(gap > 0, np.exp(-1.0 / np.where(gap > 0, gap, 1.0)), 0.0)


def two_hills_initial(x, y):
    return _bump((x - 2) ** 2 + (y + 2) ** 2) + _bump((x + 2) ** 2 + (y - 2) ** 2)


# --------------------------------------------------------------------------
# problem registry

@dataclass
class ProblemSpec:
    id: str
    dim: int
    extents: tuple
    coefficient: object
    initial: Callable
    bc: object
    t0: float
    t_final: float
    n: int
    cfl: float
    limiter: bool = False
    exact: Callable | None = None  # exact(x, t) or exact(x, y, t)
    snapshot_times: tuple = ()
    notes: dict = field(default_factory=dict)

    def grid(self, n: int | None = None, n_y: int | None = None):
        n = n or self.n
        if self.dim == 1:
            return Grid1D(self.extents[0], self.extents[1], n)
        return Grid2D(*self.extents, n, n_y or n)

    def initial_state(self, grid):
        return project_initial(grid, self.initial, self.bc)


PROBLEM_IDS = (
    "accuracy1d",
    "accuracy2d",
    "ring",
    "barenblatt",
    "two_boxes_equal",
    "two_boxes_unequal",
    "waiting_time",
    "two_hills",
)


def get_problem(problem_id: str, m: int | None = None) -> ProblemSpec:
    pid = problem_id.lower().replace("-", "_")
    if pid == "accuracy1d":
        return ProblemSpec(
            pid, 1, (0.0, 1.0), ConstScalar(HEAT_1D_A), lambda x: exact_heat_1d(x, 0.0),
            Periodic(), 0.0, 1.0, 40, 0.27, exact=exact_heat_1d,
        )
    if pid == "accuracy2d":
        return ProblemSpec(
            pid, 2, (0.0, 1.0, 0.0, 1.0), ConstMatrix(HEAT_2D_A), lambda x, y: exact_heat_2d(x, y, 0.0),
            Periodic(), 0.0, 1.0, 20, 0.15, exact=exact_heat_2d,
        )
    if pid == "ring":
        return ProblemSpec(
            pid, 2, (-1.0, 1.0, -1.0, 1.0), FieldMatrix(ring_field), ring_initial,
            FarField(0.1), 0.0, 5.0, 101, 0.15, snapshot_times=(0.1, 0.2, 0.5, 1.0, 5.0),
            notes={"domain": "[-1,1]^2 (assumed)", "bc": "far field u=0.1 (assumed)",
                   "origin": "diffusion matrix set to zero where r = 0"},
        )
    if pid == "barenblatt":
        m = 2 if m is None else int(m)
        return ProblemSpec(
            pid, 1, (-6.0, 6.0), PmePower(m), lambda x: barenblatt(1.0, m, x, 1.0),
            Periodic(), 1.0, 2.0, 100, 0.27, limiter=True,
            exact=lambda x, t: barenblatt(1.0, m, x, t), notes={"m": m},
        )
    if pid == "two_boxes_equal":
        return ProblemSpec(
            pid, 1, (-6.0, 6.0), PmePower(5), two_boxes_equal, Periodic(), 0.0, 6.0, 200, 0.27,
            limiter=True, snapshot_times=(0.3, 0.6, 0.9, 1.2, 6.0),
            notes={"m": 5, "left box": "(-3.7, -0.7)"},
        )
    if pid == "two_boxes_unequal":
        return ProblemSpec(
            pid, 1, (-6.0, 6.0), PmePower(6), two_boxes_unequal, Periodic(), 0.0, 0.8, 200, 0.27,
            limiter=True, snapshot_times=(0.02, 0.04, 0.06, 0.08, 0.8), notes={"m": 6},
        )
    if pid == "waiting_time":
        return ProblemSpec(
            pid, 1, (-2.5, 2.5), PmePower(8), waiting_time_initial, Periodic(), 0.0, 1.5, 200, 0.27,
            limiter=True, snapshot_times=(0.3, 0.6, 0.9, 1.2, 1.5), notes={"m": 8},
        )
    if pid == "two_hills":
        return ProblemSpec(
            pid, 2, (-10.0, 10.0, -10.0, 10.0), PmePower(2), two_hills_initial, Periodic(),
            0.0, 4.0, 100, 0.15, limiter=True, snapshot_times=(0.5, 1.0, 2.0, 3.0, 4.0),
            notes={"m": 2},
        )
    raise ValueError(f"unknown problem {problem_id!r} (expected one of {', '.join(PROBLEM_IDS)})")


# --------------------------------------------------------------------------
# errors

@dataclass
class ErrorNorms:
    n: int
    l2_avg: float
    linf_avg: float
    l2_pnt: float
    linf_pnt: float
    l1_avg: float
    dofs: int


def error_norms(state, exact: Callable, grid, t: float, bc=Periodic()) -> ErrorNorms:
    """Discrete norms of average and point errors.

    Average errors are taken against exact cell means (composite Gauss) and
    point errors against exact samples. L2 weights each DoF by the cell
    measure; in 2D the three point families share that weight equally.
    """
    if isinstance(grid, Grid1D):
        means = cell_means_1d(lambda x: exact(x, t), grid)
        e_avg = state.averages - means
        e_pts = [state.points - exact(grid.point_coords(bc), t)]
        measure, n = grid.dx, grid.n_cells
    else:
        means = cell_means_2d(lambda x, y: exact(x, y, t), grid)
        e_avg = state.averages - means
        xe, ye = grid.x_axis.point_coords(bc), grid.y_axis.point_coords(bc)
        xc, yc = grid.x_axis.centers, grid.y_axis.centers

        def sample(xs, ys):
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            return exact(X, Y, t)

        e_pts = [
            state.face_x - sample(xe, yc),
            state.face_y - sample(xc, ye),
            state.corners - sample(xe, ye),
        ]
        measure, n = grid.cell_area, grid.n_x
    pts_sq = sum(float(np.sum(np.abs(e) ** 2)) for e in e_pts) / len(e_pts)
    dofs = e_avg.size + sum(e.size for e in e_pts)
    return ErrorNorms(
        n=n,
        l2_avg=math.sqrt(float(np.sum(np.abs(e_avg) ** 2)) * measure),
        linf_avg=float(np.max(np.abs(e_avg))),
        l2_pnt=math.sqrt(pts_sq * measure),
        linf_pnt=max(float(np.max(np.abs(e))) for e in e_pts),
        l1_avg=float(np.sum(np.abs(e_avg))) * measure,
        dofs=dofs,
    )


def rate(coarse: float, fine: float) -> float:
    if coarse <= 0 or fine <= 0:
        return float("nan")
    return math.log2(coarse / fine)


@dataclass
class ConvergenceRow:
    norms: ErrorNorms | None
    rate_avg: float = float("nan")
    rate_pnt: float = float("nan")
    status: str = "ok"
    steps: int = 0


@dataclass
class ConvergenceTable:
    problem: str
    cfl: float
    rows: list

    def finest_rates(self) -> tuple[float, float]:
        last = self.rows[-1]
        return last.rate_avg, last.rate_pnt


def run_problem(problem: ProblemSpec, n: int | None = None, cfl: float | None = None,
                t_final: float | None = None, limiter: bool | None = None,
                variant=SchemeVariant.CENTRAL4, scheme=RkScheme.SSPRK3,
                snapshot_times=None, divergence_bound: float | None = None, n_y: int | None = None):
    grid = problem.grid(n, n_y)
    state = problem.initial_state(grid)
    control = StepControl(
        cfl if cfl is not None else problem.cfl,
        t_final if t_final is not None else problem.t_final,
        problem.limiter if limiter is None else limiter,
    )
    snaps = problem.snapshot_times if snapshot_times is None else snapshot_times
    result = advance(state, problem.coefficient, grid, control, variant, scheme, problem.bc,
                     t0=problem.t0, snapshot_times=snaps, divergence_bound=divergence_bound)
    return grid, result


def convergence_study(problem: ProblemSpec, meshes, cfl: float | None = None, t_final: float | None = None,
                      variant=SchemeVariant.CENTRAL4, scheme=RkScheme.SSPRK3,
                      divergence_factor: float = 10.0) -> ConvergenceTable:
    """Run ``problem`` on successively doubled meshes and tabulate errors and rates.

    A mesh whose solution exceeds ``divergence_factor`` times the exact
    solution's magnitude (or blows up) is recorded as ``unstable``.
    """
    if problem.exact is None:
        raise ValueError(f"{problem.id} has no exact solution")
    meshes = list(meshes)
    for a, b in zip(meshes, meshes[1:]):
        if b != 2 * a:
            raise ValueError("meshes must be successive doublings")
    cfl = problem.cfl if cfl is None else cfl
    rows = []
    prev = None
    for n in meshes:
        try:
            grid, res = run_problem(problem, n, cfl, t_final, variant=variant, scheme=scheme,
                                    snapshot_times=(), divergence_bound=divergence_factor * 1.0)
        except InstabilityError:
            rows.append(ConvergenceRow(None, status="unstable"))
            prev = None
            continue
        norms = error_norms(res.state, problem.exact, grid, res.t, problem.bc)
        row = ConvergenceRow(norms, steps=res.steps)
        if prev is not None:
            row.rate_avg = rate(prev.l2_avg, norms.l2_avg)
            row.rate_pnt = rate(prev.l2_pnt, norms.l2_pnt)
        rows.append(row)
        prev = norms
    return ConvergenceTable(problem.id, cfl, rows)


def with_overrides(problem: ProblemSpec, **kw) -> ProblemSpec:
    return replace(problem, **kw)


def ring_variation(state, grid, radius: float, bc=FarField(0.1), n_angles: int = 128) -> float:
    """max - min of the corner values, bilinearly interpolated along a circle.

    Only the angular spread is measured; the radial profile never diffuses
    under a purely tangential diffusion matrix.
    """
    xs = grid.x_axis.point_coords(bc)
    ys = grid.y_axis.point_coords(bc)
    phi = 2.0 * np.pi * np.arange(n_angles) / n_angles
    px, py = radius * np.cos(phi), radius * np.sin(phi)
    i = np.clip(((px - xs[0]) / grid.dx).astype(int), 0, xs.size - 2)
    j = np.clip(((py - ys[0]) / grid.dy).astype(int), 0, ys.size - 2)
    sx = (px - xs[i]) / grid.dx
    sy = (py - ys[j]) / grid.dy
    c = state.corners
    vals = ((1 - sx) * (1 - sy) * c[i, j] + sx * (1 - sy) * c[i + 1, j]
            + (1 - sx) * sy * c[i, j + 1] + sx * sy * c[i + 1, j + 1])
    return float(vals.max() - vals.min())
