"""Flow stepping, traces, and asymptotic rate fits."""

import numpy as np
import pytest

from kottler_imcf import (
    CFLError,
    FlowControls,
    FlowState,
    FlowSingularError,
    FlowTrace,
    GraphSurface,
    NoiseFloorError,
    TRACE_COLUMNS,
    asymptotic_rate_fit,
    cfl_limit,
    make_background,
    run_flow,
    step_graph_pde,
    step_slice_ode,
)


def _slice_state(k=0, genus=1, mass=0.5, resolution="point", rho=2.0):
    b = make_background(k, genus, resolution, mass=mass)
    return FlowState(0.0, GraphSurface(b, rho), 0)


def test_slice_ode_exact():
    state = _slice_state()
    out = step_slice_ode(state, 2.0)
    assert out.surface.radius_field[0] == pytest.approx(2.0 * np.e, rel=1e-15)
    assert out.time == 2.0
    assert out.step_count == 1


def test_slice_ode_zero_step_identity():
    state = _slice_state()
    assert step_slice_ode(state, 0.0) is state


def test_slice_ode_rejects_non_constant():
    b = make_background(1, 0, 33, mass=1.0)
    th = b.base.grid.theta
    state = FlowState(0.0, GraphSurface(b, 2.0 + 0.1 * np.cos(th)), 0)
    with pytest.raises(ValueError):
        step_slice_ode(state, 0.1)


def test_ode_area_growth():
    state = _slice_state()
    area0 = state.surface.area()
    out = step_slice_ode(state, 1.5)
    assert out.surface.area() == pytest.approx(np.e**1.5 * area0, rel=1e-12)


def test_pde_matches_ode_on_constants():
    # constant graph stepped by the PDE converges to the exact exponential
    b = make_background(1, 0, 33, mass=1.0)
    state = FlowState(0.0, GraphSurface(b, 2.0), 0)
    dt = 1e-3
    while state.time < 2.0 - 1e-12:
        state = step_graph_pde(state, min(dt, 2.0 - state.time))
    exact = 2.0 * np.e
    assert np.max(np.abs(state.surface.radius_field - exact)) < 1e-6 * exact


def test_cfl_violation_rejected():
    b = make_background(0, 1, 16, mass=0.5)
    g = b.base.grid
    s = GraphSurface(b, 3.0 + 0.1 * np.sin(2.0 * np.pi * g.theta1 / g.side))
    state = FlowState(0.0, s, 0)
    limit = cfl_limit(s, 0.2)
    with pytest.raises(CFLError):
        step_graph_pde(state, 10.0 * limit)


def test_h_floor_abort():
    b = make_background(1, 0, 33, mass=1.0)
    state = FlowState(0.0, GraphSurface(b, 2.0), 0)
    with pytest.raises(FlowSingularError):
        step_graph_pde(state, 1e-5, h_floor=10.0)


def test_run_flow_slice_trace():
    b = make_background(0, 1, "point", mass=0.5)
    trace = run_flow(GraphSurface(b, b.horizon_rho), 4.0, 0.5)
    assert trace.complete
    t = trace.times
    assert np.all(np.diff(t) > 0.0)
    assert t[0] == 0.0 and t[-1] == pytest.approx(4.0)
    area = trace.column("area")
    assert np.max(np.abs(area / (np.exp(t) * area[0]) - 1.0)) < 1e-10
    q = trace.column("Q")
    assert np.max(np.abs(q - q[0])) < 1e-10


def test_run_flow_star_floor_rejection():
    b = make_background(1, 0, 129, mass=1.0)
    th = b.base.grid.theta
    s = GraphSurface(b, 2.0 + 0.2 * np.cos(th))
    with pytest.raises(FlowSingularError):
        run_flow(s, 1.0, 0.25, FlowControls(star_floor=0.9999))


def test_run_flow_argument_validation():
    b = make_background(0, 1, "point", mass=0.5)
    s = GraphSurface(b, 2.0)
    with pytest.raises(ValueError):
        run_flow(s, -1.0, 0.5)
    with pytest.raises(ValueError):
        run_flow(s, 1.0, 0.0)


def test_run_flow_deterministic():
    def one():
        b = make_background(0, 1, 16, mass=0.5)
        g = b.base.grid
        s = GraphSurface(b, 3.0 + 0.1 * np.sin(2.0 * np.pi * g.theta1 / g.side))
        return run_flow(s, 0.5, 0.25)

    a, b = one(), one()
    assert np.array_equal(a.data, b.data)


def test_run_flow_pde_area_growth_and_traceless_decay():
    b = make_background(0, 1, 16, mass=0.5)
    g = b.base.grid
    s = GraphSurface(b, 3.0 + 0.1 * np.sin(2.0 * np.pi * g.theta1 / g.side))
    trace = run_flow(s, 1.0, 0.25)
    assert trace.complete
    t = trace.times
    area = trace.column("area")
    assert np.max(np.abs(area / (np.exp(t) * area[0]) - 1.0)) < 1e-4
    a0 = trace.column("int_A0sq")
    assert a0[-1] < a0[0]


def test_run_flow_snapshots():
    b = make_background(0, 1, "point", mass=0.5)
    trace = run_flow(GraphSurface(b, 2.0), 1.0, 0.5,
                     FlowControls(store_surfaces=True))
    assert len(trace.snapshots) == trace.n_samples
    t_last, r_last = trace.snapshots[-1]
    assert t_last == pytest.approx(1.0)
    assert r_last[0] == pytest.approx(2.0 * np.exp(0.5), rel=1e-12)


def _synthetic_trace(model):
    t = np.linspace(0.5, 6.0, 24)
    dev = 0.3 * np.exp(-t) * (t if model == "t_exp" else 1.0)
    data = np.zeros((len(t), len(TRACE_COLUMNS)))
    data[:, TRACE_COLUMNS.index("t")] = t
    data[:, TRACE_COLUMNS.index("min_align")] = 1.0 - dev
    return FlowTrace(data=data)


def test_rate_fit_recovers_synthetic_exponent():
    rate, amp, residual = asymptotic_rate_fit(_synthetic_trace("exp"), "min_align")
    assert rate == pytest.approx(-1.0, abs=1e-10)
    assert amp == pytest.approx(0.3, rel=1e-9)
    assert residual < 1e-10


def test_rate_fit_model_selection():
    trace = _synthetic_trace("t_exp")
    _, _, res_texp = asymptotic_rate_fit(trace, "min_align", model="t_exp")
    _, _, res_exp = asymptotic_rate_fit(trace, "min_align", model="exp")
    assert res_texp < res_exp


def test_rate_fit_noise_floor():
    t = np.linspace(0.5, 6.0, 24)
    data = np.zeros((len(t), len(TRACE_COLUMNS)))
    data[:, TRACE_COLUMNS.index("t")] = t
    data[:, TRACE_COLUMNS.index("min_align")] = 1.0
    with pytest.raises(NoiseFloorError):
        asymptotic_rate_fit(FlowTrace(data=data), "min_align")


def test_rate_fit_unknown_column_target():
    with pytest.raises(ValueError):
        asymptotic_rate_fit(_synthetic_trace("exp"), "area")
    with pytest.raises(ValueError):
        asymptotic_rate_fit(_synthetic_trace("exp"), "min_align", model="bogus")
