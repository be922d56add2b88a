"""Problem data: parameters, box penalization, reaction presets, sources.

The penalization ``yosida_penalty`` is the Moreau-Yosida regularization of
the subdifferential of the indicator of [0, 1]: piecewise linear, zero on
the box, slope 1/eps outside it.  Its convex potential
``yosida_potential`` feeds the energy line search of the nonlinear solver.

Reactions are presets (zero, linear, sine) so that the advertised
Lipschitz constant is trustworthy by construction.  Sources are presets
too; the per-step value is always the time average over the step,
computed with a 4-point Gauss rule (exact for polynomials in t of degree
up to 7) and evaluated at cell centers in space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Grid1D, GridFunction

__all__ = [
    "ModelParams",
    "ReactionSpec",
    "SourceSpec",
    "InitialDatum",
    "yosida_penalty",
    "yosida_potential",
    "yosida_derivative",
    "make_initial",
]

REACTION_KINDS = ("zero", "linear", "sine")
SOURCE_KINDS = ("zero", "constant", "cosine", "tabulated")
INITIAL_KINDS = ("constant", "cosine")

# 4-point Gauss-Legendre nodes/weights on [-1, 1]
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class ModelParams:
    """Scheme parameters with the time-step gate tau * L_beta < 1.

    tau is derived as T / M.  Construction fails for p < 2, non-positive
    eps / T / length, M < 1, or tau * L_beta >= 1; the time stepper never
    has to guess what to do outside the well-posed regime.
    """

    p: float
    eps: float
    T: float
    M: int
    L_beta: float = 0.0
    length: float = 1.0

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if self.L_beta < 0:
            raise ValueError(f"L_beta must be nonnegative, got {self.L_beta}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if not self.tau * self.L_beta < 1.0:
            raise ValueError(
                f"tau * L_beta = {self.tau * self.L_beta} >= 1; the implicit "
                f"step is only well-posed for tau < 1 / L_beta"
            )

    @property
    def tau(self) -> float:
        """Time step T / M."""
        return self.T / self.M


def yosida_penalty(v, eps: float):
    """Piecewise-linear penalization of the box [0, 1].

    v / eps for v <= 0, zero on [0, 1], (v - 1) / eps above.  Monotone
    nondecreasing and (1/eps)-Lipschitz.  Accepts scalars or arrays.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    v = np.asarray(v, dtype=float)
    out = np.where(v <= 0.0, v / eps, np.where(v <= 1.0, 0.0, (v - 1.0) / eps))
    return float(out) if out.ndim == 0 else out


def yosida_potential(v, eps: float):
    """Convex C^1 antiderivative of :func:`yosida_penalty`, zero on [0, 1].

    (v^-)^2 / (2 eps) + ((v - 1)^+)^2 / (2 eps).
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    v = np.asarray(v, dtype=float)
    neg = np.minimum(v, 0.0)
    exc = np.maximum(v - 1.0, 0.0)
    out = (neg**2 + exc**2) / (2.0 * eps)
    return float(out) if out.ndim == 0 else out


def yosida_derivative(v, eps: float):
    """Generalized derivative of the penalization: 1/eps off the box, else 0.

    At the kinks 0 and 1 the value 0 is used (a Clarke subgradient choice
    that keeps the Newton matrix contributions minimal).
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    v = np.asarray(v, dtype=float)
    out = np.where((v < 0.0) | (v > 1.0), 1.0 / eps, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ReactionSpec:
    """Lipschitz reaction preset with beta(0) = 0.

    kind is one of "zero", "linear" (scale * r) or "sine" (scale * sin r);
    ``scale`` is the Lipschitz constant of the realized reaction in every
    case.
    """

    kind: str = "zero"
    scale: float = 0.0

    def __post_init__(self):
        if self.kind not in REACTION_KINDS:
            raise ValueError(f"unknown reaction kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError(f"reaction scale must be nonnegative, got {self.scale}")

    def evaluate(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(v)
        elif self.kind == "linear":
            out = self.scale * v
        else:
            out = self.scale * np.sin(v)
        return float(out) if out.ndim == 0 else out

    def derivative(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(v)
        elif self.kind == "linear":
            out = np.full_like(v, self.scale)
        else:
            out = self.scale * np.cos(v)
        return float(out) if out.ndim == 0 else out

    def antiderivative(self, v):
        """Antiderivative with value 0 at 0 (enters the solver energy)."""
        v = np.asarray(v, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(v)
        elif self.kind == "linear":
            out = 0.5 * self.scale * v**2
        else:
            out = self.scale * (1.0 - np.cos(v))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SourceSpec:
    """Time-and-space source f(t, x), preset + parameters.

    Presets:
      zero        f = 0
      constant    f = value
      cosine      f = offset + amp * exp(-decay * t) * cos(pi * x / length)
      tabulated   values on the grid at given times, linear in t

    ``step_average`` returns the average of f over one time step as a
    GridFunction, which is the only way the stepper consumes a source.
    """

    kind: str = "zero"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "constant" and "value" not in self.params:
            raise ValueError("constant source needs a 'value' parameter")
        if self.kind == "cosine":
            missing = {"offset", "amp", "decay", "length"} - set(self.params)
            if missing:
                raise ValueError(f"cosine source missing parameters {sorted(missing)}")
        if self.kind == "tabulated":
            missing = {"times", "values"} - set(self.params)
            if missing:
                raise ValueError(f"tabulated source missing {sorted(missing)}")
            times = np.asarray(self.params["times"], dtype=float)
            values = np.asarray(self.params["values"], dtype=float)
            if times.ndim != 1 or values.shape[0] != times.size:
                raise ValueError("tabulated source needs len(times) rows of values")
            if np.any(np.diff(times) <= 0):
                raise ValueError("tabulated times must be strictly increasing")
            if not np.all(np.isfinite(values)):
                raise ValueError("tabulated values must be finite")

    def evaluate(self, t: float, x: np.ndarray) -> np.ndarray:
        """Pointwise f(t, x) for an array of spatial coordinates."""
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "constant":
            return np.full_like(x, float(self.params["value"]))
        if self.kind == "cosine":
            pr = self.params
            return float(pr["offset"]) + float(pr["amp"]) * np.exp(
                -float(pr["decay"]) * t
            ) * np.cos(np.pi * x / float(pr["length"]))
        times = np.asarray(self.params["times"], dtype=float)
        values = np.asarray(self.params["values"], dtype=float)
        if values.shape[1] != x.size:
            raise ValueError(
                f"tabulated source has {values.shape[1]} columns, grid has {x.size}"
            )
        out = np.empty_like(x)
        for i in range(x.size):
            out[i] = np.interp(t, times, values[:, i])
        return out

    def step_average(self, n: int, grid: Grid1D, tau: float) -> GridFunction:
        """Average of f over [n tau, (n+1) tau] at the cell centers.

        4-point Gauss in time: exact for sources polynomial in t up to
        degree 7, so quadrature never pollutes a refinement table for
        smooth manufactured sources.
        """
        if n < 0:
            raise ValueError(f"step index must be nonnegative, got {n}")
        x = grid.cell_centers()
        if self.kind == "zero":
            return grid.zeros()
        if self.kind == "constant":
            return grid.function(np.full(grid.n_cells, float(self.params["value"])))
        t0 = n * tau
        acc = np.zeros(grid.n_cells)
        for node, weight in zip(_GAUSS_NODES, _GAUSS_WEIGHTS):
            t = t0 + 0.5 * tau * (node + 1.0)
            acc += weight * self.evaluate(t, x)
        return grid.function(0.5 * acc)


@dataclass(frozen=True)
class InitialDatum:
    """Deterministic initial state, constrained to the box [0, 1] cellwise."""

    u0: GridFunction

    def __post_init__(self):
        vals = self.u0.values
        if np.any(vals < 0.0) or np.any(vals > 1.0):
            raise ValueError("initial datum must take values in [0, 1]")


def make_initial(grid: Grid1D, kind: str = "constant", params: dict | None = None) -> InitialDatum:
    """Build an initial datum preset.

    constant: {"value": c}; cosine: {"offset": a, "amp": b} giving
    a + b * cos(pi x / length).  The box constraint is validated either way.
    """
    params = params or {}
    if kind == "constant":
        value = float(params.get("value", 0.5))
        return InitialDatum(grid.function(np.full(grid.n_cells, value)))
    if kind == "cosine":
        offset = float(params.get("offset", 0.5))
        amp = float(params.get("amp", 0.25))
        x = grid.cell_centers()
        return InitialDatum(
            grid.function(offset + amp * np.cos(np.pi * x / grid.length))
        )
    raise ValueError(f"unknown initial datum kind {kind!r}")
