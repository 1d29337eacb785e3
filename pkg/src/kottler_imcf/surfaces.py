"""Star-shaped radial graphs and their extrinsic geometry.

A surface is the graph rho = r(theta) over the background's cross-section.
The induced metric, unit normal, second fundamental form, and mean
curvature come from the closed-form warped-product Christoffel symbols
combined with second-order centered differences of r.  For constant
radius fields every finite difference vanishes identically, so slices
reproduce the closed forms with no discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .base import AxisymmetricSphereGrid, FlatTorusGrid, PointGrid, integrate
from .background import KottlerBackground
from .errors import ExteriorError, FlowSingularError

__all__ = [
    "SurfaceGeometry",
    "GraphSurface",
    "compute_geometry",
    "radial_alignment",
    "star_shaped_check",
]


@dataclass(frozen=True)
class SurfaceGeometry:
    """Per-node geometric data of a radial graph.

    area_density is the area element per unit cross-section measure, so
    integrate(base, area_density) is the surface area.  graph_factor is
    the conversion between normal speed and radial coordinate speed
    (equal to |grad(rho - r)|_g evaluated on the surface).
    """

    potential: np.ndarray
    area_density: np.ndarray
    mean_curvature: np.ndarray
    traceless_sq: np.ndarray
    alignment: np.ndarray
    graph_factor: np.ndarray


def _sphere_derivatives(r, spacing):
    # Reflective (even) extension across both poles: Neumann r'(0)=r'(pi)=0.
    ext = np.concatenate(([r[1]], r, [r[-2]]))
    d1 = (ext[2:] - ext[:-2]) / (2.0 * spacing)
    d2 = (ext[2:] - 2.0 * ext[1:-1] + ext[:-2]) / spacing**2
    d1[0] = 0.0
    d1[-1] = 0.0
    return d1, d2


def _sphere_geometry(background, grid, r):
    theta = grid.theta
    f = background.v_squared(r)
    v = np.sqrt(f)
    f1 = 2.0 * r + 2.0 * background.mass / r**2

    r_t, r_tt = _sphere_derivatives(r, grid.spacing)
    grad_sq = r_t**2
    n_f = np.sqrt(f + grad_sq / r**2)

    gamma_tt = grad_sq / f + r**2
    h_tt = (-r_tt + f * r + 2.0 * grad_sq / r + grad_sq * 0.5 * f1 / f) / n_f
    k1 = h_tt / gamma_tt

    # Azimuthal principal curvature; the cot(theta) term is regularized at
    # the poles by its L'Hopital limit cot(theta) r_t -> r_tt.
    k2 = np.empty_like(r)
    interior = slice(1, -1)
    cot = np.cos(theta[interior]) / np.sin(theta[interior])
    k2[interior] = (-cot * r_t[interior] + f[interior] * r[interior]) / (
        n_f[interior] * r[interior] ** 2
    )
    for pole in (0, -1):
        k2[pole] = (-r_tt[pole] + f[pole] * r[pole]) / (n_f[pole] * r[pole] ** 2)
        k1[pole] = k2[pole]

    mean_curv = k1 + k2
    traceless_sq = 0.5 * (k1 - k2) ** 2
    area_density = r * np.sqrt(r**2 + grad_sq / f)
    return SurfaceGeometry(
        potential=v,
        area_density=area_density,
        mean_curvature=mean_curv,
        traceless_sq=traceless_sq,
        alignment=v / n_f,
        graph_factor=n_f,
    )


def _roll_d1(r, axis, h):
    return (np.roll(r, -1, axis=axis) - np.roll(r, 1, axis=axis)) / (2.0 * h)


def _roll_d2(r, axis, h):
    return (np.roll(r, -1, axis=axis) - 2.0 * r + np.roll(r, 1, axis=axis)) / h**2


def _torus_geometry(background, grid, r):
    h = grid.spacing
    f = background.v_squared(r)
    v = np.sqrt(f)
    f1 = 2.0 * r + 2.0 * background.mass / r**2

    r1 = _roll_d1(r, 0, h)
    r2 = _roll_d1(r, 1, h)
    r11 = _roll_d2(r, 0, h)
    r22 = _roll_d2(r, 1, h)
    r12 = (
        np.roll(np.roll(r, -1, 0), -1, 1)
        - np.roll(np.roll(r, -1, 0), 1, 1)
        - np.roll(np.roll(r, 1, 0), -1, 1)
        + np.roll(np.roll(r, 1, 0), 1, 1)
    ) / (4.0 * h**2)

    grad_sq = r1**2 + r2**2
    n_f = np.sqrt(f + grad_sq / r**2)

    g11 = r1 * r1 / f + r**2
    g22 = r2 * r2 / f + r**2
    g12 = r1 * r2 / f
    det = g11 * g22 - g12**2
    i11 = g22 / det
    i22 = g11 / det
    i12 = -g12 / det

    fac = 2.0 / r + 0.5 * f1 / f
    h11 = (-r11 + f * r + fac * r1 * r1) / n_f
    h22 = (-r22 + f * r + fac * r2 * r2) / n_f
    h12 = (-r12 + fac * r1 * r2) / n_f

    mean_curv = i11 * h11 + i22 * h22 + 2.0 * i12 * h12
    # |A|^2 = tr(S^2) with shape operator S = gamma^{-1} h (not symmetric
    # as a matrix, so the cross terms pair S12 with S21).
    s11 = i11 * h11 + i12 * h12
    s12 = i11 * h12 + i12 * h22
    s21 = i12 * h11 + i22 * h12
    s22 = i12 * h12 + i22 * h22
    a_sq = s11**2 + s22**2 + 2.0 * s12 * s21
    traceless_sq = np.maximum(a_sq - 0.5 * mean_curv**2, 0.0)
    area_density = np.sqrt(det)
    return SurfaceGeometry(
        potential=v,
        area_density=area_density,
        mean_curvature=mean_curv,
        traceless_sq=traceless_sq,
        alignment=v / n_f,
        graph_factor=n_f,
    )


def _slice_geometry(background, r):
    f = background.v_squared(r)
    v = np.sqrt(f)
    zeros = np.zeros_like(r)
    return SurfaceGeometry(
        potential=v,
        area_density=r**2,
        mean_curvature=2.0 * v / r,
        traceless_sq=zeros,
        alignment=np.ones_like(r),
        graph_factor=v,
    )


@dataclass
class GraphSurface:
    """A radial graph rho = r(theta) in a Kottler background."""

    background: KottlerBackground
    radius_field: np.ndarray
    _geometry: SurfaceGeometry | None = dataclass_field(default=None, repr=False)

    def __post_init__(self):
        grid = self.background.base.grid
        r = np.atleast_1d(np.asarray(self.radius_field, dtype=float))
        if isinstance(grid, FlatTorusGrid) and r.ndim == 0:
            r = np.full((grid.n, grid.n), float(r))
        if isinstance(grid, PointGrid):
            r = r.reshape(1)
        if r.shape != grid.weights.shape:
            if r.size == 1:
                r = np.full(grid.weights.shape, float(r.ravel()[0]))
            else:
                raise ValueError(
                    f"radius field shape {r.shape} does not match grid {grid.weights.shape}"
                )
        if not np.all(np.isfinite(r)):
            raise FlowSingularError("non-finite radius field")
        # r == horizon_rho is allowed: the horizon slice is valid initial
        # data for the exact slice flow (where V = 0 but the radial speed
        # rho/2 stays finite).
        if np.any(r < self.background.horizon_rho):
            raise ExteriorError("surface must not dip below the horizon")
        self.radius_field = r

    @property
    def is_constant(self):
        return np.ptp(self.radius_field) == 0.0

    @property
    def geometry(self):
        if self._geometry is None:
            compute_geometry(self)
        return self._geometry

    def area(self):
        return integrate(self.background.base, self.geometry.area_density)


def compute_geometry(surface):
    """Fill the surface's geometry cache; returns the surface."""
    grid = surface.background.base.grid
    r = surface.radius_field
    if isinstance(grid, PointGrid) or surface.is_constant:
        geom = _slice_geometry(surface.background, r)
    elif isinstance(grid, AxisymmetricSphereGrid):
        geom = _sphere_geometry(surface.background, grid, r)
    elif isinstance(grid, FlatTorusGrid):
        geom = _torus_geometry(surface.background, grid, r)
    else:
        raise TypeError(f"unsupported grid kind {type(grid).__name__}")
    if not np.all(np.isfinite(geom.mean_curvature)):
        raise FlowSingularError("non-finite mean curvature")
    surface._geometry = geom
    return surface


def radial_alignment(surface):
    """Inner product of the unit normal with the exact-metric radial unit vector."""
    return surface.geometry.alignment


def star_shaped_check(surface, floor):
    """True iff the radial alignment stays at or above the floor everywhere."""
    return bool(np.min(radial_alignment(surface)) >= floor)
