"""Truncated Q-Wiener increments and the state-dependent diffusion.

The stochastic forcing applied at each step is

    sum_{j=1..J} g_j(u_i) * dW_j,    g_j(r) = sigma * 2^{-j/2} * phi(r),

where phi is a fixed C^1 bump supported on [1/4, 3/4]: the diffusion
switches off before the state reaches the box boundary.  Geometric mode
amplitudes make the squared sum of the g_j Lipschitz constants summable
with the closed-form bound L_g = sigma^2 * 4 pi^2 (|phi'| <= 2 pi and
sum 2^{-j} <= 1).

Only the scalar increments dW_j ever enter the scheme, so no abstract
Hilbert-space objects are stored: a path is an (M, J) matrix of
independent N(0, tau) draws, reproducible from a 64-bit seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import GridFunction

__all__ = [
    "NoiseModel",
    "PathIncrements",
    "bump_profile",
    "bump_slope",
]

SUPPORT = (0.25, 0.75)


def bump_profile(r):
    """C^1 bump sin^2(2 pi (r - 1/4)) on [1/4, 3/4], zero elsewhere."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    mask = (r > SUPPORT[0]) & (r < SUPPORT[1])
    out[mask] = np.sin(2.0 * np.pi * (r[mask] - SUPPORT[0])) ** 2
    return float(out) if out.ndim == 0 else out


def bump_slope(r):
    """Derivative of :func:`bump_profile`; bounded by 2 pi in absolute value."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    mask = (r > SUPPORT[0]) & (r < SUPPORT[1])
    out[mask] = 2.0 * np.pi * np.sin(4.0 * np.pi * (r[mask] - SUPPORT[0]))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PathIncrements:
    """Matrix of Wiener increments: rows are time steps, columns modes.

    Entry (n, j) is the increment of the j-th scalar Wiener process over
    step n, i.i.d. N(0, tau).  ``seed`` records provenance; the matrix is
    a deterministic function of (seed, M, J, tau).
    """

    values: np.ndarray
    tau: float = 0.0
    seed: int = 0

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"increments must be a 2-D matrix, got ndim={arr.ndim}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n_steps(self) -> int:
        return self.values.shape[0]

    @property
    def n_modes(self) -> int:
        return self.values.shape[1]

    def coarsen(self, factor: int) -> "PathIncrements":
        """Aggregate groups of ``factor`` consecutive rows by summation.

        The result is the same Brownian path sampled on a grid ``factor``
        times coarser (increment variance factor * tau); this is what lets
        refinement studies reuse one path across all time-step levels.
        """
        if factor < 1:
            raise ValueError(f"factor must be >= 1, got {factor}")
        if self.n_steps % factor != 0:
            raise ValueError(
                f"factor {factor} does not divide the number of rows {self.n_steps}"
            )
        coarse = self.values.reshape(
            self.n_steps // factor, factor, self.n_modes
        ).sum(axis=1)
        return PathIncrements(coarse, tau=self.tau * factor, seed=self.seed)

    def to_csv(self, target) -> None:
        """Write the matrix as CSV: header j1..jJ, one row per step, LF endings."""
        close = False
        if isinstance(target, (str, bytes)):
            target = open(target, "w", newline="\n")
            close = True
        try:
            target.write(",".join(f"j{j + 1}" for j in range(self.n_modes)) + "\n")
            for row in self.values:
                target.write(",".join(repr(float(v)) for v in row) + "\n")
        finally:
            if close:
                target.close()


@dataclass(frozen=True)
class NoiseModel:
    """Truncated diffusion: J modes, amplitudes sigma * 2^{-j/2}, common bump."""

    J: int = 16
    sigma: float = 0.0

    def __post_init__(self):
        if self.J < 1:
            raise ValueError(f"J must be a positive integer, got {self.J}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def amplitudes(self) -> np.ndarray:
        """Mode amplitudes c_j = sigma * 2^{-j/2}, j = 1..J."""
        return self.sigma * 2.0 ** (-0.5 * np.arange(1, self.J + 1))

    @property
    def L_g(self) -> float:
        """Closed-form squared-sum Lipschitz bound sigma^2 * 4 pi^2."""
        return self.sigma**2 * 4.0 * np.pi**2

    def sample_path(self, M: int, tau: float, seed: int) -> PathIncrements:
        """Draw the (M, J) increment matrix for one path.

        Entries are i.i.d. N(0, tau); identical (M, tau, seed) give a
        bit-identical matrix, which is the whole reproducibility contract.
        """
        if M < 1:
            raise ValueError(f"M must be >= 1, got {M}")
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau}")
        rng = np.random.default_rng(seed)
        return PathIncrements(
            np.sqrt(tau) * rng.standard_normal((M, self.J)), tau=tau, seed=seed
        )

    def apply_diffusion(self, u: GridFunction, dw_row: np.ndarray) -> GridFunction:
        """Forcing cell i: sum_j g_j(u_i) dW_j = phi(u_i) * sum_j c_j dW_j.

        Identically zero on cells where u_i is outside the bump support.
        """
        dw_row = np.asarray(dw_row, dtype=float)
        if dw_row.shape != (self.J,):
            raise ValueError(f"expected {self.J} increments, got shape {dw_row.shape}")
        coef = float(np.dot(self.amplitudes, dw_row))
        return u.grid.function(bump_profile(u.values) * coef)

    def hs_lipschitz_estimate(self, samples: int, seed: int = 0) -> float:
        """Empirical sup of sum_j |g_j(r) - g_j(s)|^2 / |r - s|^2.

        Samples wide pairs over [-1/2, 3/2] plus tight pairs concentrated
        where the bump is steep; always bounded by :attr:`L_g`.
        """
        if samples < 1:
            raise ValueError(f"samples must be >= 1, got {samples}")
        rng = np.random.default_rng(seed)
        n_wide = samples // 2 + 1
        r = rng.uniform(-0.5, 1.5, n_wide)
        s = rng.uniform(-0.5, 1.5, n_wide)
        r2 = rng.uniform(SUPPORT[0], SUPPORT[1], samples - n_wide + 1)
        s2 = r2 + rng.uniform(-1e-4, 1e-4, r2.size)
        r = np.concatenate([r, r2])
        s = np.concatenate([s, s2])
        keep = r != s
        r, s = r[keep], s[keep]
        if r.size == 0:
            return 0.0
        sum_sq = float(np.dot(self.amplitudes, self.amplitudes))
        ratio = sum_sq * ((bump_profile(r) - bump_profile(s)) / (r - s)) ** 2
        return float(ratio.max())
