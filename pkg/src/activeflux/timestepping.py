"""Explicit Runge-Kutta stepping with CFL and positivity time-step control."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .limiter import PositivityLimiter, pp_time_step_bound
from .mesh import BoundaryCondition, Grid1D, Periodic, half_grid_1d, half_grid_2d
from .operators import SchemeVariant
from .semidiscrete import PmePower, rhs, scalar_coefficient, spectral_radius_field

logger = logging.getLogger(__name__)


class RkScheme(str, enum.Enum):
    SSPRK3 = "ssprk3"
    RK4 = "rk4"

    @classmethod
    def parse(cls, value) -> "RkScheme":
        if isinstance(value, cls):
            return value
        aliases = {"3": cls.SSPRK3, "ssprk3": cls.SSPRK3, "4": cls.RK4, "rk4": cls.RK4}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown Runge-Kutta scheme {value!r}") from None

    @property
    def order(self) -> int:
        return 3 if self is RkScheme.SSPRK3 else 4


@dataclass
class StepControl:
    cfl_number: float
    t_final: float
    limiter_enabled: bool = False

    def __post_init__(self):
        if not self.cfl_number > 0:
            raise ValueError("CFL number must be positive")


class InstabilityError(RuntimeError):
    pass


def max_diffusivity(state, coeff, grid, bc: BoundaryCondition = Periodic()) -> float:
    """Largest eigenvalue of the diffusion coefficient over points and cell centers."""
    if isinstance(grid, Grid1D):
        u, _ = half_grid_1d(state.averages, state.points, bc)
        return float(np.max(scalar_coefficient(coeff, u)))
    u, _ = half_grid_2d(state, bc)
    return spectral_radius_field(coeff, u, grid.half_grid_coords(bc))


def stable_dt(state, coeff, grid, control: StepControl, t: float = 0.0,
              bc: BoundaryCondition = Periodic()) -> float:
    remaining = control.t_final - t
    amax = max_diffusivity(state, coeff, grid, bc)
    if amax <= 0.0:
        return remaining
    if isinstance(grid, Grid1D):
        dt = control.cfl_number * grid.dx**2 / amax
    else:
        dt = control.cfl_number * min(grid.dx, grid.dy) ** 2 / amax
    if control.limiter_enabled:
        dt = min(dt, pp_time_step_bound(state, _coefficient_fn(coeff), grid, bc))
    return min(dt, remaining)


def _coefficient_fn(coeff):
    if isinstance(coeff, PmePower):
        return coeff.a
    return lambda u: scalar_coefficient(coeff, u) * np.ones_like(np.asarray(u, dtype=float))


def rk_step(state, rhs_fn: Callable, dt: float, scheme=RkScheme.SSPRK3, limiter_hook=None):
    """One Runge-Kutta step; ``rhs_fn(state)`` returns an Rhs1D/Rhs2D.

    With a ``limiter_hook`` every forward-Euler stage of SSP-RK3 is replaced by
    ``limiter_hook(state, rhs, dt)``.
    """
    scheme = RkScheme.parse(scheme)
    with np.errstate(over="ignore", invalid="ignore"):
        new = _rk_stages(state, rhs_fn, dt, scheme, limiter_hook)
    if not new.is_finite():
        raise InstabilityError("non-finite values after Runge-Kutta step")
    return new


def _rk_stages(state, rhs_fn, dt, scheme, limiter_hook):
    def euler(u):
        r = rhs_fn(u)
        if limiter_hook is not None:
            return limiter_hook(u, r, dt)
        return u + dt * r.as_state()

    if scheme is RkScheme.SSPRK3:
        u1 = euler(state)
        u2 = 0.75 * state + 0.25 * euler(u1)
        new = (1.0 / 3.0) * state + (2.0 / 3.0) * euler(u2)
    else:
        if limiter_hook is not None:
            raise ValueError("the positivity limiter requires SSP-RK3")
        k1 = rhs_fn(state).as_state()
        k2 = rhs_fn(state + (0.5 * dt) * k1).as_state()
        k3 = rhs_fn(state + (0.5 * dt) * k2).as_state()
        k4 = rhs_fn(state + dt * k3).as_state()
        new = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return new


def _measure(grid) -> float:
    return grid.dx if isinstance(grid, Grid1D) else grid.cell_area


def total_mass(state, grid) -> float:
    return float(np.sum(state.averages)) * _measure(grid)


@dataclass
class AdvanceResult:
    state: object
    t: float
    steps: int
    min_history: list = field(default_factory=list)
    mass_history: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    stage_minimum: float = np.inf
    mass_scale: float = 0.0

    @property
    def min_dof(self) -> float:
        return min(self.min_history) if self.min_history else self.state.min()

    @property
    def mass_drift(self) -> float:
        """Largest mass change relative to max(|mass|, L1 norm) of the initial averages.

        The L1 floor keeps the measure meaningful for zero-mean data.
        """
        m0 = self.mass_history[0]
        scale = max(abs(m0), self.mass_scale, 1e-300)
        return max(abs(m - m0) for m in self.mass_history) / scale


class _TrackingLimiter(PositivityLimiter):
    """Also records the smallest DoF produced by any limited stage."""

    stage_minimum = np.inf

    def __call__(self, state, r, dt):
        out = super().__call__(state, r, dt)
        self.stage_minimum = min(self.stage_minimum, out.min())
        return out


def advance(state, coeff, grid, control: StepControl, variant=SchemeVariant.CENTRAL4,
            scheme=RkScheme.SSPRK3, bc: BoundaryCondition = Periodic(), t0: float = 0.0,
            snapshot_times=(), max_steps: int | None = None,
            divergence_bound: float | None = None) -> AdvanceResult:
    """Integrate from ``t0`` to ``control.t_final``.

    Steps are shortened to land exactly on every snapshot time and on
    ``t_final``. ``divergence_bound`` aborts with InstabilityError once any
    DoF exceeds it in magnitude.
    """
    scheme = RkScheme.parse(scheme)
    state.check(grid, bc)
    hook = None
    if control.limiter_enabled:
        hook = _TrackingLimiter(_coefficient_fn(coeff), grid, bc)

    def rhs_fn(u):
        return rhs(u, coeff, grid, bc, variant)

    t = t0
    pending = sorted(s for s in snapshot_times if t0 <= s <= control.t_final)
    result = AdvanceResult(state, t, 0, mass_scale=float(np.sum(np.abs(state.averages))) * _measure(grid))
    result.min_history.append(state.min())
    result.mass_history.append(total_mass(state, grid))
    while pending and pending[0] <= t:
        result.snapshots[pending.pop(0)] = state.copy()
    steps = 0
    while t < control.t_final:
        target = pending[0] if pending else control.t_final
        dt = stable_dt(state, coeff, grid, StepControl(control.cfl_number, target, control.limiter_enabled), t, bc)
        if dt <= 0:
            break
        state = rk_step(state, rhs_fn, dt, scheme, hook)
        steps += 1
        t = target if target - (t + dt) <= 1e-14 * max(1.0, abs(target)) else t + dt
        result.min_history.append(state.min())
        result.mass_history.append(total_mass(state, grid))
        if divergence_bound is not None and max(abs(state.min()), abs(state.max())) > divergence_bound:
            raise InstabilityError(f"solution exceeded {divergence_bound} at t={t:.6g} after {steps} steps")
        while pending and pending[0] <= t:
            result.snapshots[pending.pop(0)] = state.copy()
        if max_steps is not None and steps >= max_steps:
            break
    result.state = state
    result.t = t
    result.steps = steps
    if hook is not None:
        result.stage_minimum = hook.stage_minimum
    logger.debug("advanced %d steps to t=%g", steps, t)
    return result
