"""Graph surface geometry: slice exactness and convergence to exact values.

The curved-graph oracles below are mean curvatures computed from first
principles with a computer algebra system (ambient Christoffel symbols
of the warped metric, embedding derivatives, unit normal), evaluated at
grid-representable points to 25 digits and frozen here.
"""

import numpy as np
import pytest

from kottler_imcf import (
    ExteriorError,
    FlowSingularError,
    GraphSurface,
    compute_geometry,
    make_background,
    radial_alignment,
    star_shaped_check,
)

# r = 2 + cos(theta)/5 over ADS-Schwarzschild mass 1, at theta = pi/4, pi/2, 3pi/4
SPHERE_H_ORACLE = {
    0.25: 2.043944733606924330890829,
    0.50: 2.002797317955478426537711,
    0.75: 1.935372296370642564194330,
}
# r = 3 + sin(2 pi t1)/10 over toroidal Kottler mass 1/2, at t1 = 1/8, 1/4, 5/8
TORUS_H_ORACLE = {
    0.125: 2.065311404643498909001953,
    0.250: 2.100945964553240691798536,
    0.625: 1.849835389642934509313853,
}


@pytest.mark.parametrize(
    "k,genus,mass,resolution",
    [(1, 0, 1.0, 65), (0, 1, 0.5, 16), (-1, 2, 1.0, "point")],
)
def test_slice_geometry_exact(k, genus, mass, resolution):
    b = make_background(k, genus, resolution, mass=mass)
    rho = 2.0 * b.horizon_rho
    s = GraphSurface(b, rho)
    g = s.geometry
    v = b.potential(rho)
    assert np.max(np.abs(g.mean_curvature - 2.0 * v / rho)) == 0.0
    assert np.max(np.abs(g.area_density - rho**2)) == 0.0
    assert np.max(np.abs(g.alignment - 1.0)) == 0.0
    assert np.max(np.abs(g.traceless_sq)) == 0.0
    assert s.area() == pytest.approx(b.base.area * rho**2, rel=1e-14)


def _sphere_surface(n, amplitude=0.2):
    b = make_background(1, 0, n, mass=1.0)
    th = b.base.grid.theta
    return GraphSurface(b, 2.0 + amplitude * np.cos(th)), th


def _torus_surface(n, amplitude=0.1):
    b = make_background(0, 1, n, mass=0.5)
    g = b.base.grid
    return GraphSurface(b, 3.0 + amplitude * np.sin(2.0 * np.pi * g.theta1 / g.side)), g


def _sphere_oracle_error(n):
    s, th = _sphere_surface(n)
    H = s.geometry.mean_curvature
    return max(
        abs(H[np.argmin(np.abs(th - frac * np.pi))] - exact)
        for frac, exact in SPHERE_H_ORACLE.items()
    )


def _torus_oracle_error(n):
    s, g = _torus_surface(n)
    H = s.geometry.mean_curvature
    t1 = g.theta1[:, 0]
    return max(
        abs(H[np.argmin(np.abs(t1 - pos)), 0] - exact)
        for pos, exact in TORUS_H_ORACLE.items()
    )


def test_sphere_mean_curvature_matches_oracle():
    assert _sphere_oracle_error(129) < 5e-6


def test_sphere_mean_curvature_second_order():
    ratio = _sphere_oracle_error(65) / _sphere_oracle_error(129)
    assert ratio == pytest.approx(4.0, rel=0.15)


def test_torus_mean_curvature_matches_oracle():
    assert _torus_oracle_error(64) < 2e-4


def test_torus_mean_curvature_second_order():
    ratio = _torus_oracle_error(32) / _torus_oracle_error(64)
    assert ratio == pytest.approx(4.0, rel=0.15)


def test_alignment_bounded_by_one():
    for surface in (_sphere_surface(65)[0], _torus_surface(32)[0]):
        align = radial_alignment(surface)
        assert np.all(align <= 1.0 + 1e-15)
        assert np.all(align > 0.0)


def test_traceless_sq_nonnegative_and_consistent():
    s, _ = _torus_surface(32)
    g = s.geometry
    assert np.all(g.traceless_sq >= 0.0)
    # perturbation is genuinely non-umbilic somewhere
    assert np.max(g.traceless_sq) > 1e-4


def test_sphere_pole_regularity():
    # pole values must match the interior limit smoothly; compare the two
    # principal curvatures, equal at the axis by symmetry
    s, th = _sphere_surface(257)
    H = s.geometry.mean_curvature
    # H is smooth through the pole: second difference stays bounded
    d2 = np.abs(H[0] - 2.0 * H[1] + H[2])
    assert d2 < 1e-3


def test_area_density_matches_area_growth_of_radius():
    s, g = _torus_surface(32)
    area = s.area()
    slice_area = GraphSurface(s.background, 3.0).area()
    assert area > slice_area  # perturbation increases area


def test_horizon_slice_allowed_but_interior_rejected():
    b = make_background(1, 0, 65, mass=1.0)
    GraphSurface(b, b.horizon_rho)  # boundary case is valid initial data
    with pytest.raises(ExteriorError):
        GraphSurface(b, 0.99 * b.horizon_rho)


def test_shape_mismatch_rejected():
    b = make_background(1, 0, 65, mass=1.0)
    with pytest.raises(ValueError):
        GraphSurface(b, np.ones(17))


def test_non_finite_radius_rejected():
    b = make_background(1, 0, 65, mass=1.0)
    r = np.full(65, 2.0)
    r[3] = np.nan
    with pytest.raises(FlowSingularError):
        GraphSurface(b, r)


def test_scalar_radius_broadcast():
    b = make_background(0, 1, 16, mass=0.5)
    s = GraphSurface(b, 2.0)
    assert s.radius_field.shape == (16, 16)
    assert s.is_constant


def test_star_shaped_check():
    s, _ = _sphere_surface(65)
    assert star_shaped_check(s, 0.1)
    assert not star_shaped_check(s, 1.0 + 1e-9)


def test_compute_geometry_idempotent_cache():
    s, _ = _sphere_surface(65)
    g1 = s.geometry
    compute_geometry(s)
    assert np.array_equal(s.geometry.mean_curvature, g1.mean_curvature)
