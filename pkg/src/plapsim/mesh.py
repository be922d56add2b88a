"""Cell-centered 1-D meshes and discrete norms with zero-flux boundaries.

The interval (0, length) is split into ``n_cells`` uniform cells of width
``h``.  Scalar fields live at cell centers; gradients live at the
``n_cells - 1`` interior faces.  Boundary faces carry no flux, so the
homogeneous Neumann condition is structural rather than an equation
modification, and the discrete summation-by-parts identity

    h * sum_f grad(u)_f grad(v)_f == -h * sum_i div(grad(u))_i v_i

holds exactly (up to round-off).  All quadratures are the plain weighted
sums h * sum(.).  ``norm_w1p`` returns the p-th *power* of the Sobolev-type
norm, because every estimate built on top of it is stated in powers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid1D",
    "GridFunction",
    "FaceField",
    "gradient",
    "divergence",
    "inner",
    "norm_l2",
    "norm_w1p",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered mesh of the interval (0, length)."""

    n_cells: int
    length: float = 1.0

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError(f"n_cells must be >= 2, got {self.n_cells}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def h(self) -> float:
        """Cell width."""
        return self.length / self.n_cells

    def cell_centers(self) -> np.ndarray:
        """Coordinates of the cell centers, (i + 1/2) * h."""
        return (np.arange(self.n_cells) + 0.5) * self.h

    def function(self, values) -> "GridFunction":
        """Wrap an array of cell values as a GridFunction on this grid."""
        return GridFunction(self, values)

    def zeros(self) -> "GridFunction":
        return GridFunction(self, np.zeros(self.n_cells))


def _frozen_array(values, size: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (size,):
        raise ValueError(f"{what} must have shape ({size},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GridFunction:
    """Real-valued field sampled at the cell centers of a Grid1D.

    The value array is copied and frozen on construction, so instances can
    be shared across concurrent tasks.
    """

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen_array(self.values, self.grid.n_cells, "values")
        )


@dataclass(frozen=True)
class FaceField:
    """Field on the interior faces of a Grid1D (boundary flux is zero)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self,
            "values",
            _frozen_array(self.values, self.grid.n_cells - 1, "face values"),
        )


def gradient(u: GridFunction) -> FaceField:
    """Two-point gradient (u_{i+1} - u_i) / h at the interior faces.

    The omitted boundary faces carry zero flux, which is how the Neumann
    condition enters every operator built from this gradient.
    """
    return FaceField(u.grid, np.diff(u.values) / u.grid.h)


def divergence(flux: FaceField) -> GridFunction:
    """Discrete divergence (F_{i+1/2} - F_{i-1/2}) / h with zero boundary flux.

    Adjoint (up to sign) of :func:`gradient` under the h-weighted inner
    products; the pairing identity is exact, see the module docstring.
    """
    g = flux.grid
    div = np.zeros(g.n_cells)
    div[:-1] += flux.values
    div[1:] -= flux.values
    return GridFunction(g, div / g.h)


def inner(u: GridFunction, v: GridFunction) -> float:
    """Discrete L2 pairing h * sum_i u_i v_i."""
    return float(u.grid.h * np.dot(u.values, v.values))


def norm_l2(u: GridFunction) -> float:
    """Discrete L2 norm sqrt(h * sum_i u_i^2)."""
    return float(np.sqrt(u.grid.h * np.dot(u.values, u.values)))


def norm_w1p(u: GridFunction, p: float) -> float:
    """p-th power of the discrete W^{1,p} norm.

    Returns h * sum_f |grad(u)_f|^p + h * sum_i |u_i|^p.  Requires p >= 2;
    for p = 2 and constant u this reduces to norm_l2(u)**2.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    h = u.grid.h
    du = np.diff(u.values) / h
    return float(h * np.sum(np.abs(du) ** p) + h * np.sum(np.abs(u.values) ** p))
