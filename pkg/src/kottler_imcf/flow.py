"""Inverse mean curvature flow of radial graphs.

Constant graphs evolve by the exact radial ODE rho(t) = rho(0) e^{t/2},
with no integration error.  Non-constant graphs evolve the radius field
by the graphical flow equation

    dr/dt = graph_factor / H,

stepped with an explicit midpoint (RK2) scheme under a parabolic CFL
restriction.  Traces record scalar functionals, not surfaces, at fixed
sample times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import integrate
from .errors import CFLError, FlowSingularError, NoiseFloorError
from .functionals import (
    bulk_integral,
    compute_P,
    compute_Q,
    hawking_mass,
    total_mean_curvature,
)
from .surfaces import GraphSurface, star_shaped_check

__all__ = [
    "TRACE_COLUMNS",
    "FlowState",
    "FlowTrace",
    "FlowControls",
    "cfl_limit",
    "step_slice_ode",
    "step_graph_pde",
    "run_flow",
    "asymptotic_rate_fit",
]

TRACE_COLUMNS = (
    "t",
    "area",
    "int_VH",
    "int_OmegaV",
    "Q",
    "P",
    "hawking_mass",
    "min_H",
    "max_H",
    "min_align",
    "int_A0sq",
)


@dataclass(frozen=True)
class FlowState:
    """One instant of a flow: time, surface, and accepted step count."""

    time: float
    surface: GraphSurface
    step_count: int


@dataclass
class FlowControls:
    """Step-size and safety parameters for a flow run."""

    cfl: float = 0.2
    h_floor: float = 1e-6
    star_floor: float = 0.1
    max_dt: float | None = None
    store_surfaces: bool = False


@dataclass
class FlowTrace:
    """Time series of scalar functionals sampled along one flow."""

    data: np.ndarray  # shape (n_samples, len(TRACE_COLUMNS))
    complete: bool = True
    abort_reason: str | None = None
    snapshots: list = field(default_factory=list)

    def column(self, name):
        return self.data[:, TRACE_COLUMNS.index(name)]

    @property
    def times(self):
        return self.column("t")

    @property
    def n_samples(self):
        return self.data.shape[0]


def _sample_row(state):
    surface = state.surface
    g = surface.geometry
    base = surface.background.base
    row = (
        state.time,
        surface.area(),
        total_mean_curvature(surface),
        bulk_integral(surface),
        compute_Q(surface),
        compute_P(surface),
        float(hawking_mass(surface)),
        float(np.min(g.mean_curvature)),
        float(np.max(g.mean_curvature)),
        float(np.min(g.alignment)),
        integrate(base, g.traceless_sq * g.area_density),
    )
    if not all(np.isfinite(row)):
        raise FlowSingularError(f"non-finite functional value at t = {state.time}")
    return row


def cfl_limit(surface, cfl=0.2):
    """Largest stable explicit time step for the graphical flow.

    The diffusion coefficient of the linearized operator scales like
    graph_factor^2 / (H^2 lambda^2) per unit grid spacing squared, with
    lambda = r the metric scale of one grid cell.
    """
    g = surface.geometry
    spacing = surface.background.base.grid.spacing
    local = (spacing * surface.radius_field) ** 2 * g.mean_curvature**2 / g.graph_factor**2
    return cfl * float(np.min(local))


def step_slice_ode(state, dt):
    """Advance a constant graph by the exact slice solution."""
    if not state.surface.is_constant:
        raise ValueError("slice ODE step requires a constant graph")
    if dt == 0.0:
        return state
    new_r = state.surface.radius_field * np.exp(0.5 * dt)
    surface = GraphSurface(state.surface.background, new_r)
    return FlowState(state.time + dt, surface, state.step_count + 1)


def _velocity(surface, h_floor):
    g = surface.geometry
    if np.min(g.mean_curvature) <= h_floor:
        raise FlowSingularError(
            f"min H = {np.min(g.mean_curvature):.3e} at or below floor {h_floor}"
        )
    return g.graph_factor / g.mean_curvature


def step_graph_pde(state, dt, h_floor=1e-6, cfl=0.2):
    """One explicit midpoint step of the graphical flow equation."""
    surface = state.surface
    limit = cfl_limit(surface, cfl)
    if dt > limit * (1.0 + 1e-12):
        raise CFLError(f"dt = {dt:.3e} exceeds stability limit {limit:.3e}")
    r = surface.radius_field
    v1 = _velocity(surface, h_floor)
    half = GraphSurface(surface.background, r + 0.5 * dt * v1)
    v2 = _velocity(half, h_floor)
    new_surface = GraphSurface(surface.background, r + dt * v2)
    _velocity(new_surface, h_floor)  # mean-convexity must survive the step
    return FlowState(state.time + dt, new_surface, state.step_count + 1)


def run_flow(initial, t_end, sample_interval, controls=None):
    """Drive a flow to t_end, sampling functionals at fixed intervals.

    Constant graphs take the exact ODE path directly between sample
    times; all other graphs take CFL-limited explicit steps.  On a flow
    abort the partial trace is returned with ``complete`` False.
    """
    if controls is None:
        controls = FlowControls()
    if t_end <= 0.0 or sample_interval <= 0.0:
        raise ValueError("t_end and sample_interval must be positive")
    if not star_shaped_check(initial, controls.star_floor):
        raise FlowSingularError(
            f"initial surface fails the star-shape floor {controls.star_floor}"
        )

    state = FlowState(0.0, initial, 0)
    rows = [_sample_row(state)]
    snapshots = [(0.0, initial.radius_field.copy())] if controls.store_surfaces else []
    ode_path = initial.is_constant
    complete = True
    abort_reason = None

    sample_index = 1
    next_sample = min(sample_interval, t_end)
    try:
        while state.time < t_end - 1e-12:
            if ode_path:
                state = step_slice_ode(state, next_sample - state.time)
            else:
                dt = min(cfl_limit(state.surface, controls.cfl), next_sample - state.time)
                if controls.max_dt is not None:
                    dt = min(dt, controls.max_dt)
                state = step_graph_pde(state, dt, controls.h_floor, controls.cfl)
            if state.time >= next_sample - 1e-12:
                rows.append(_sample_row(state))
                if controls.store_surfaces:
                    snapshots.append((state.time, state.surface.radius_field.copy()))
                sample_index += 1
                next_sample = min(sample_index * sample_interval, t_end)
    except (FlowSingularError, CFLError) as err:
        complete = False
        abort_reason = str(err)

    return FlowTrace(
        data=np.array(rows, dtype=float),
        complete=complete,
        abort_reason=abort_reason,
        snapshots=snapshots,
    )


_FIT_TARGETS = {"min_align": 1.0, "min_H": 2.0, "max_H": 2.0}


def asymptotic_rate_fit(trace, column, model="exp", target=None, noise_floor=1e-12):
    """Fit the late-time decay rate of a trace column toward its limit.

    The deviation |column - target| is fitted in log space against
    ``exp`` (A e^{rate t}) or ``t_exp`` (A t e^{rate t}) over the last
    three quarters of the samples (at least 8); the discarded head skips
    the initial transient while the window stays wide enough to separate
    the two models.  Returns (rate, amplitude, residual) with residual
    the RMS log misfit.  Raises NoiseFloorError when the deviation sits
    at round-off, where a fit is meaningless.
    """
    if target is None:
        if column not in _FIT_TARGETS:
            raise ValueError(f"no default target for column {column!r}")
        target = _FIT_TARGETS[column]
    t = trace.times
    dev = np.abs(trace.column(column) - target)
    n_fit = max(8, 3 * len(t) // 4)
    if len(t) < n_fit:
        raise ValueError(f"need at least {n_fit} samples, got {len(t)}")
    t = t[-n_fit:]
    dev = dev[-n_fit:]
    scale = max(abs(target), 1.0)
    if np.max(dev) <= noise_floor * scale:
        raise NoiseFloorError(
            f"column {column!r} deviation at round-off ({np.max(dev):.3e})"
        )
    if np.any(dev <= 0.0) or np.any(t <= 0.0):
        raise NoiseFloorError(f"column {column!r} deviation touches zero in the window")
    y = np.log(dev)
    if model == "t_exp":
        y = y - np.log(t)
    elif model != "exp":
        raise ValueError(f"unknown model {model!r}")
    rate, log_amp = np.polyfit(t, y, 1)
    residual = float(np.sqrt(np.mean((np.polyval((rate, log_amp), t) - y) ** 2)))
    return float(rate), float(np.exp(log_amp)), residual
