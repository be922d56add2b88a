"""Inversion of the per-step operator and its stability checks.

Each time step needs one solve of apply(u) = rhs.  The operator is the
gradient (up to the cell weight h) of a strongly convex energy, so a
semismooth Newton method with backtracking on that energy converges
globally: the Newton direction comes from one SPD tridiagonal solve, an
Armijo test accepts or shrinks the step, and a steepest-descent fallback
guards the (theoretically impossible) case of a non-descent Newton
direction.  Near the minimum the energy decrease per step drops below
float resolution, so the accept test carries an absolute slack of a few
ulps; convergence is always declared on the residual norm, never on the
energy.

``stability_bounds`` and ``apriori_bound_check`` evaluate the two
quantitative consequences of strong monotonicity for the inverse map:
a Lipschitz bound in L2 with constant 1/(1 - tau L_beta), and an a priori
bound of the solution's W^{1,p} power by the data, both as checkable
booleans with explicit slack.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mesh import GridFunction, norm_l2, norm_w1p
from .operators import OperatorContext

__all__ = [
    "SolverConfig",
    "SolveReport",
    "NonConvergence",
    "solve",
    "stability_bounds",
    "stability_slacks",
    "apriori_bound_check",
]


class NonConvergence(RuntimeError):
    """Raised when the Newton iteration cap is hit; signals a config problem."""


@dataclass(frozen=True)
class SolverConfig:
    """Newton/line-search knobs.  Residuals are measured in discrete L2."""

    tol_residual: float = 1e-10
    max_newton: int = 50
    backtrack_factor: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 40

    def __post_init__(self):
        if not self.tol_residual > 0:
            raise ValueError(f"tol_residual must be positive, got {self.tol_residual}")
        if self.max_newton < 1 or self.max_backtracks < 1:
            raise ValueError("iteration caps must be >= 1")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if not 0 < self.sufficient_decrease < 1:
            raise ValueError("sufficient_decrease must lie in (0, 1)")


@dataclass
class SolveReport:
    """Diagnostics of one nonlinear solve."""

    iterations: int
    residual_history: list
    energy_history: list
    converged: bool

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "residual_history": list(self.residual_history),
            "energy_history": list(self.energy_history),
            "converged": self.converged,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _search(energy, u, d, slope, base_energy, cfg):
    """Backtracking Armijo search along d; returns (point, energy, ok)."""
    # a few ulps of slack keep the test meaningful once the true decrease
    # underflows the float resolution of the energy
    slack = 16.0 * np.finfo(float).eps * max(1.0, abs(base_energy))
    alpha = 1.0
    for _ in range(cfg.max_backtracks):
        trial = u + alpha * d
        e_trial = energy(trial)
        if e_trial <= base_energy + cfg.sufficient_decrease * alpha * slope + slack:
            return trial, e_trial, True
        alpha *= cfg.backtrack_factor
    return u, base_energy, False


def solve(
    ctx: OperatorContext,
    rhs: GridFunction,
    guess: GridFunction | None = None,
    cfg: SolverConfig | None = None,
) -> tuple[GridFunction, SolveReport]:
    """Solve apply(u) = rhs; returns the solution and a SolveReport.

    The result satisfies ||apply(u) - rhs||_{L2,h} <= cfg.tol_residual and,
    by strong monotonicity, is independent of the starting guess up to
    residual tolerance.  Raises :class:`NonConvergence` if the Newton cap
    is exhausted, which does not happen for valid contexts.
    """
    cfg = cfg or SolverConfig()
    g = ctx.grid
    h = g.h
    rhs_vals = rhs.values
    u = np.zeros(g.n_cells) if guess is None else guess.values.copy()

    def residual(vec):
        return ctx.apply(g.function(vec)).values - rhs_vals

    def energy(vec):
        return ctx.energy(g.function(vec), rhs)

    r = residual(u)
    res = float(np.sqrt(h * np.dot(r, r)))
    e = energy(u)
    residual_history = [res]
    energy_history = [e]
    iterations = 0

    while res > cfg.tol_residual:
        if iterations >= cfg.max_newton:
            raise NonConvergence(
                f"no convergence after {iterations} Newton steps "
                f"(residual {res:.3e}, tol {cfg.tol_residual:.3e})"
            )
        d = ctx.jacobian(g.function(u)).solve(-r)
        slope = h * np.dot(r, d)  # directional derivative of the energy
        if not np.isfinite(slope) or slope >= 0.0:
            d = -r
            slope = -h * np.dot(r, r)
        u_new, e_new, ok = _search(energy, u, d, slope, e, cfg)
        if not ok:
            # guarded fallback; unreachable for an SPD Jacobian
            d = -r
            slope = -h * np.dot(r, r)
            u_new, e_new, ok = _search(energy, u, d, slope, e, cfg)
            if not ok:
                raise NonConvergence("line search failed along steepest descent")
        u, e = u_new, e_new
        r = residual(u)
        res = float(np.sqrt(h * np.dot(r, r)))
        iterations += 1
        residual_history.append(res)
        energy_history.append(e)

    report = SolveReport(iterations, residual_history, energy_history, True)
    return g.function(u), report


def stability_slacks(
    ctx: OperatorContext,
    rhs1: GridFunction,
    rhs2: GridFunction,
    sol1: GridFunction,
    sol2: GridFunction,
) -> tuple[float, float]:
    """Slacks (bound - left side) of the two inverse-map inequalities.

    L2 stability:  ||sol1 - sol2|| <= ||rhs1 - rhs2|| / (1 - tau L_beta)
    W^{1,p} input: tau 2^{2-p} ||sol1 - sol2||_{W^{1,p}}^p
                   <= ||rhs1 - rhs2|| * ||sol1 - sol2||
    """
    pr = ctx.params
    diff_rhs = ctx.grid.function(rhs1.values - rhs2.values)
    diff_sol = ctx.grid.function(sol1.values - sol2.values)
    drhs = norm_l2(diff_rhs)
    dsol = norm_l2(diff_sol)
    slack_l2 = drhs / (1.0 - pr.tau * pr.L_beta) - dsol
    cp = 2.0 ** (2.0 - pr.p)
    slack_v = drhs * dsol - pr.tau * cp * norm_w1p(diff_sol, pr.p)
    return float(slack_l2), float(slack_v)


def stability_bounds(
    ctx: OperatorContext,
    rhs1: GridFunction,
    rhs2: GridFunction,
    sol1: GridFunction,
    sol2: GridFunction,
    slack: float = 1e-8,
) -> tuple[bool, bool]:
    """Whether both inverse-map inequalities hold with the given slack."""
    slack_l2, slack_v = stability_slacks(ctx, rhs1, rhs2, sol1, sol2)
    return slack_l2 >= -slack, slack_v >= -slack


def apriori_bound_check(
    ctx: OperatorContext,
    rhs: GridFunction,
    sol: GridFunction,
    slack: float = 1e-8,
) -> bool:
    """Check ||sol||_{W^{1,p}}^p <= ||rhs||^2 / (4 tau (1 - tau L_beta)).

    This is the energy estimate of the solve tested with its own solution,
    with the free parameter chosen optimally at 2 (1 - tau L_beta).
    """
    pr = ctx.params
    bound = norm_l2(rhs) ** 2 / (4.0 * pr.tau * (1.0 - pr.tau * pr.L_beta))
    return norm_w1p(sol, pr.p) <= bound + slack
