"""Closed constant-curvature cross-sections and their quadrature rules.

The cross-section carries a Gauss curvature sign in {-1, 0, +1}, a genus,
and a total area tied to the curvature by Gauss-Bonnet.  Three grid kinds
are supported: an axisymmetric colatitude grid on the round sphere, a
periodic square grid on the flat torus, and a single-point grid used for
constant graphs over hyperbolic bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import InvalidBaseError

__all__ = [
    "AxisymmetricSphereGrid",
    "FlatTorusGrid",
    "PointGrid",
    "BaseSurface",
    "make_base",
    "integrate",
]

MIN_RESOLUTION = 8


@dataclass(frozen=True)
class AxisymmetricSphereGrid:
    """Uniform colatitude nodes on [0, pi]; fields depend on colatitude only.

    Quadrature is composite Simpson against the sin(theta) area weight,
    rescaled so the constant 1 integrates to exactly 4*pi.
    """

    n_points: int
    theta: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def n_nodes(self):
        return self.n_points

    @property
    def spacing(self):
        return np.pi / (self.n_points - 1)


@dataclass(frozen=True)
class FlatTorusGrid:
    """n x n periodic grid on [0, L)^2 with uniform trapezoid weights."""

    n: int
    side: float
    theta1: np.ndarray = field(repr=False)
    theta2: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def n_nodes(self):
        return self.n * self.n

    @property
    def spacing(self):
        return self.side / self.n


@dataclass(frozen=True)
class PointGrid:
    """A single representative point; only constant fields are meaningful."""

    area: float

    @property
    def n_nodes(self):
        return 1

    @property
    def weights(self):
        return np.array([self.area])


@dataclass(frozen=True)
class BaseSurface:
    """The cross-section (Sigma-hat, g-hat) with its grid and quadrature."""

    curvature_sign: int
    area: float
    euler_char: int
    genus: int
    grid: AxisymmetricSphereGrid | FlatTorusGrid | PointGrid

    def __post_init__(self):
        # Gauss-Bonnet must hold exactly by construction.
        if self.curvature_sign * self.area != 2.0 * np.pi * self.euler_char:
            raise InvalidBaseError(
                f"Gauss-Bonnet violated: k*area = {self.curvature_sign * self.area}, "
                f"2*pi*chi = {2.0 * np.pi * self.euler_char}"
            )
        if self.euler_char != 2 - 2 * self.genus:
            raise InvalidBaseError(f"euler_char {self.euler_char} != 2 - 2*genus")


def _sphere_grid(n_points):
    theta = np.linspace(0.0, np.pi, n_points)
    # Simpson weights for each node, obtained by integrating the nodal basis.
    w_simpson = simpson(np.eye(n_points), x=theta, axis=0)
    weights = 2.0 * np.pi * w_simpson * np.sin(theta)
    weights *= 4.0 * np.pi / weights.sum()
    return AxisymmetricSphereGrid(n_points=n_points, theta=theta, weights=weights)


def _torus_grid(n, side):
    t1 = np.arange(n) * (side / n)
    theta1, theta2 = np.meshgrid(t1, t1, indexing="ij")
    weights = np.full((n, n), (side / n) ** 2)
    return FlatTorusGrid(n=n, side=side, theta1=theta1, theta2=theta2, weights=weights)


def make_base(curvature_sign, genus, grid_resolution, area=None):
    """Construct a cross-section.

    Parameters
    ----------
    curvature_sign : int in {-1, 0, +1}
    genus : int
        Must match the curvature sign: 0 for +1, 1 for 0, >= 2 for -1.
    grid_resolution : int or "point"
        Node count (colatitude nodes for the sphere, n for the n x n torus
        grid).  "point" requests the single-point grid.
    area : float, optional
        Overrides the flat-torus area (default 1).  Ignored for curved
        bases, whose area is forced by Gauss-Bonnet.
    """
    if curvature_sign not in (-1, 0, 1):
        raise InvalidBaseError(f"curvature_sign must be -1, 0, or +1, got {curvature_sign}")
    expected = {1: genus == 0, 0: genus == 1, -1: genus >= 2}
    if not expected[curvature_sign]:
        raise InvalidBaseError(
            f"genus {genus} incompatible with curvature sign {curvature_sign}"
        )
    euler_char = 2 - 2 * genus

    if curvature_sign == 1:
        w2 = 4.0 * np.pi
    elif curvature_sign == -1:
        w2 = -2.0 * np.pi * euler_char  # 4*pi*(genus - 1)
    else:
        w2 = 1.0 if area is None else float(area)
        if w2 <= 0:
            raise InvalidBaseError("torus area must be positive")
    if curvature_sign != 0 and area is not None and not np.isclose(area, w2):
        raise InvalidBaseError("area of a curved base is fixed by Gauss-Bonnet")

    point = grid_resolution in ("point", None)
    if not point:
        resolution = int(grid_resolution)
        if resolution < MIN_RESOLUTION:
            raise InvalidBaseError(f"resolution {resolution} < {MIN_RESOLUTION}")

    if point:
        grid = PointGrid(area=w2)
    elif curvature_sign == 1:
        grid = _sphere_grid(resolution)
    elif curvature_sign == 0:
        grid = _torus_grid(resolution, np.sqrt(w2))
    else:
        raise InvalidBaseError(
            "hyperbolic bases support only the point grid (constant graphs)"
        )
    return BaseSurface(
        curvature_sign=curvature_sign,
        area=w2,
        euler_char=euler_char,
        genus=genus,
        grid=grid,
    )


def integrate(base, field):
    """Quadrature of a scalar field over the cross-section.

    ``field`` may be a scalar (treated as constant) or an array of node
    samples matching the grid shape.
    """
    grid = base.grid
    field = np.asarray(field, dtype=float)
    if field.ndim == 0:
        return float(field) * base.area
    if field.shape != grid.weights.shape:
        raise ValueError(
            f"field shape {field.shape} does not match grid shape {grid.weights.shape}"
        )
    return float(np.sum(grid.weights * field))
