"""Experiments and inequality verification.

Four kinds of output, all reproducible from explicit seeds:

* ``estimate_cp``: empirical infimum of the scalar monotonicity ratio
  behind the strong monotonicity bound; certifies the constant 2^{2-p}.
* refinement studies: deterministic manufactured-solution convergence
  (coupled time/space and spatial-only), penalization strength versus the
  box violation, and pathwise time-refinement under common random numbers
  (one Brownian path reused across levels by increment aggregation).
* ``run_mc``: per-time Monte Carlo statistics over independent paths.
* ``verify_all``: every computable inequality and determinism contract of
  the stack, as a structured pass/fail report with measured slacks and a
  coverage checklist.

No convergence rate for the stochastic scheme is asserted anywhere: the
stochastic tables are recorded observations only.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .mesh import Grid1D, divergence, gradient, inner, norm_l2, norm_w1p
from .model import (
    InitialDatum,
    ModelParams,
    ReactionSpec,
    SourceSpec,
    make_initial,
    yosida_penalty,
    yosida_potential,
)
from .noise import NoiseModel, bump_profile
from .operators import OperatorContext
from .solver import SolverConfig, solve, stability_slacks
from .stepper import run_path

__all__ = [
    "RefinementTable",
    "McSummary",
    "VerificationReport",
    "estimate_cp",
    "manufactured_state",
    "manufactured_problem",
    "run_deterministic_convergence",
    "run_eps_study",
    "run_mc",
    "run_pathwise_refinement",
    "verify_all",
    "CHECKLIST",
]


# ---------------------------------------------------------------------------
# result containers


@dataclass
class RefinementTable:
    """Rows of (refinement parameter, measured value, ratio to previous row)."""

    parameter: str
    values: list
    errors: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != len(self.errors):
            raise ValueError("values and errors must have equal length")
        diffs = np.diff(np.asarray(self.values, dtype=float))
        if not (np.all(diffs < 0) or np.all(diffs > 0)):
            raise ValueError("refinement parameter must be strictly monotone")

    def ratios(self) -> list:
        """errors[k-1] / errors[k] between adjacent rows; first entry is nan."""
        out = [float("nan")]
        for prev, cur in zip(self.errors, self.errors[1:]):
            out.append(prev / cur if cur != 0 else float("inf"))
        return out

    def orders(self) -> list:
        """Observed order log(e ratio) / log(parameter ratio), adjacent rows."""
        out = [float("nan")]
        for (vp, vc), (ep, ec) in zip(
            zip(self.values, self.values[1:]), zip(self.errors, self.errors[1:])
        ):
            if ec == 0 or ep == 0:
                out.append(float("inf"))
            else:
                out.append(float(np.log(ep / ec) / np.log(vp / vc)))
        return out

    def to_csv(self, target) -> None:
        close = False
        if isinstance(target, (str, bytes)):
            target = open(target, "w", newline="\n")
            close = True
        try:
            for key in sorted(self.metadata):
                target.write(f"# {key}: {self.metadata[key]}\n")
            target.write(f"{self.parameter},error,ratio\n")
            ratios = self.ratios()
            for i, (v, e) in enumerate(zip(self.values, self.errors)):
                ratio = "" if i == 0 else repr(ratios[i])
                target.write(f"{float(v)!r},{float(e)!r},{ratio}\n")
        finally:
            if close:
                target.close()


@dataclass
class McSummary:
    """Per-time-point Monte Carlo statistics over independent paths.

    Half-widths are the 95% normal-approximation values 1.96 sqrt(var/n);
    they are zero, not positive, when the paths are deterministic.
    """

    n_paths: int
    base_seed: int
    times: np.ndarray
    mean_l2: np.ndarray
    var_l2: np.ndarray
    hw_l2: np.ndarray
    mean_violation: np.ndarray
    var_violation: np.ndarray
    hw_violation: np.ndarray

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError(f"n_paths must be >= 2, got {self.n_paths}")

    def to_dict(self) -> dict:
        return {
            "n_paths": self.n_paths,
            "base_seed": self.base_seed,
            "times": [float(t) for t in self.times],
            "mean_l2": [float(v) for v in self.mean_l2],
            "var_l2": [float(v) for v in self.var_l2],
            "hw_l2": [float(v) for v in self.hw_l2],
            "mean_violation": [float(v) for v in self.mean_violation],
            "var_violation": [float(v) for v in self.var_violation],
            "hw_violation": [float(v) for v in self.hw_violation],
        }

    def to_csv(self, target) -> None:
        close = False
        if isinstance(target, (str, bytes)):
            target = open(target, "w", newline="\n")
            close = True
        try:
            target.write(f"# n_paths: {self.n_paths}\n")
            target.write(f"# base_seed: {self.base_seed}\n")
            target.write(
                "t,mean_l2,var_l2,hw_l2,mean_violation,var_violation,hw_violation\n"
            )
            for row in zip(
                self.times,
                self.mean_l2,
                self.var_l2,
                self.hw_l2,
                self.mean_violation,
                self.var_violation,
                self.hw_violation,
            ):
                target.write(",".join(repr(float(v)) for v in row) + "\n")
        finally:
            if close:
                target.close()


# ---------------------------------------------------------------------------
# algebraic inequality constant


def estimate_cp(p: float, d: int = 1, samples: int = 10**6, seed: int = 0) -> float:
    """Empirical infimum of (|a|^{p-2}a - |b|^{p-2}b).(a-b) / |a-b|^p.

    Mixes uniform, Gaussian and adversarial near-antipodal pairs in R^d;
    the infimum is attained at exactly antipodal pairs (b = -a), where the
    ratio equals 4 / 2^p = 2^{2-p}, so the estimate lands on that constant
    to round-off.  For p = 2 the ratio is identically one.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if d not in (1, 2, 3):
        raise ValueError(f"d must be 1, 2 or 3, got {d}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    n_uni = max(samples // 3, 1)
    n_gau = max(samples // 3, 1)
    n_adv = max(samples - n_uni - n_gau, 2)

    a_uni = rng.uniform(-3.0, 3.0, (n_uni, d))
    b_uni = rng.uniform(-3.0, 3.0, (n_uni, d))
    a_gau = rng.standard_normal((n_gau, d))
    b_gau = rng.standard_normal((n_gau, d))
    a_adv = rng.uniform(-2.0, 2.0, (n_adv, d))
    wiggle = rng.uniform(-1e-3, 1e-3, (n_adv, 1))
    wiggle[: n_adv // 2] = 0.0  # exact antipodal pairs attain the infimum
    b_adv = -a_adv * (1.0 + wiggle)

    a = np.concatenate([a_uni, a_gau, a_adv])
    b = np.concatenate([b_uni, b_gau, b_adv])
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    diff = a - b
    ndiff = np.linalg.norm(diff, axis=1)
    keep = ndiff > 1e-12 * (na + nb + 1.0)
    m = na[keep, None] ** (p - 2.0) * a[keep] - nb[keep, None] ** (p - 2.0) * b[keep]
    num = np.sum(m * diff[keep], axis=1)
    den = ndiff[keep] ** p
    return float(np.min(num / den))


# ---------------------------------------------------------------------------
# manufactured deterministic problem


def manufactured_state(t, x, length: float = 1.0):
    """Smooth reference state 1/2 + (1/4) e^{-t} cos(pi x / length).

    Ranges over [1/4, 3/4], so the box penalization never activates, and
    has zero normal derivative at both ends of the interval.
    """
    return 0.5 + 0.25 * np.exp(-t) * np.cos(np.pi * np.asarray(x) / length)


def manufactured_problem(
    n_cells: int,
    M: int,
    T: float = 0.5,
    length: float = 1.0,
    steady: bool = False,
    eps: float = 0.1,
):
    """Build (ctx, initial, source) for the p = 2 manufactured case.

    The reaction is linear with slope 1/2; the source is chosen so the
    reference state (time-dependent, or its t = 0 profile frozen in time
    when ``steady``) solves the noise-free equation exactly.
    """
    k = np.pi / length
    params = ModelParams(p=2.0, eps=eps, T=T, M=M, L_beta=0.5, length=length)
    reaction = ReactionSpec("linear", 0.5)
    grid = Grid1D(n_cells, length)
    ctx = OperatorContext(params, reaction, grid)
    initial = make_initial(grid, "cosine", {"offset": 0.5, "amp": 0.25})
    if steady:
        amp = 0.25 * (k**2 + 0.5)
        decay = 0.0
    else:
        amp = 0.25 * (k**2 - 0.5)
        decay = 1.0
    source = SourceSpec(
        "cosine", {"offset": 0.25, "amp": amp, "decay": decay, "length": length}
    )
    return ctx, initial, source


def run_deterministic_convergence(
    mode: str = "coupled",
    levels: int = 4,
    n0: int = 32,
    M0: int = 8,
    T: float = 0.5,
    length: float = 1.0,
    solver_cfg: SolverConfig | None = None,
) -> RefinementTable:
    """Refinement table of discrete L2 errors against the manufactured state.

    mode "coupled": halve tau per level and shrink h like sqrt(tau)
    (h^2 proportional to tau), so the first-order time error dominates a
    balanced second-order space error; the table indexes by tau.
    mode "spatial": freeze the reference in time, fix the step count, and
    double the cell count per level; the table indexes by h.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if mode not in ("coupled", "spatial"):
        raise ValueError(f"mode must be 'coupled' or 'spatial', got {mode!r}")
    quiet_noise = NoiseModel(J=1, sigma=0.0)
    values, errors = [], []
    for level in range(levels):
        if mode == "coupled":
            M = M0 * 2**level
            n_cells = max(2, round(n0 * np.sqrt(2.0**level)))
            steady = False
        else:
            M = M0
            n_cells = n0 * 2**level
            steady = True
        ctx, initial, source = manufactured_problem(
            n_cells, M, T=T, length=length, steady=steady
        )
        traj = run_path(ctx, quiet_noise, initial, source, seed=0, cfg=solver_cfg)
        x = ctx.grid.cell_centers()
        ref = manufactured_state(0.0 if steady else T, x, length)
        err = norm_l2(ctx.grid.function(traj.final_state.values - ref))
        values.append(ctx.params.tau if mode == "coupled" else ctx.grid.h)
        errors.append(err)
    meta = {
        "mode": mode,
        "norm": "discrete_l2_at_final_time",
        "reference": "manufactured cosine state",
        "T": T,
        "levels": levels,
        "seed_policy": "deterministic (sigma = 0)",
    }
    return RefinementTable("tau" if mode == "coupled" else "h", values, errors, meta)


# ---------------------------------------------------------------------------
# penalization study


def run_eps_study(
    eps_list,
    params: ModelParams,
    reaction: ReactionSpec,
    grid: Grid1D,
    noise_model: NoiseModel,
    source: SourceSpec,
    initial: InitialDatum,
    n_paths: int = 8,
    base_seed: int = 0,
    solver_cfg: SolverConfig | None = None,
) -> RefinementTable:
    """Mean (over paths) of the max-over-time box violation, per eps level.

    The same path seeds are reused at every level (common random numbers),
    so the table isolates the effect of the penalization strength.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2 or any(e <= 0 for e in eps_list):
        raise ValueError("need at least two positive eps levels")
    means, halfwidths = [], []
    for eps in eps_list:
        ctx = OperatorContext(replace(params, eps=eps), reaction, grid)
        peaks = np.empty(n_paths)
        for k in range(n_paths):
            traj = run_path(
                ctx,
                noise_model,
                initial,
                source,
                seed=base_seed + k,
                cfg=solver_cfg,
                mode="thin",
            )
            peaks[k] = traj.violations.max()
        means.append(float(peaks.mean()))
        if n_paths > 1:
            halfwidths.append(float(1.96 * np.sqrt(peaks.var(ddof=1) / n_paths)))
        else:
            halfwidths.append(0.0)
    meta = {
        "quantity": "mean over paths of max-over-time constraint violation",
        "n_paths": n_paths,
        "base_seed": base_seed,
        "halfwidths": halfwidths,
        "seed_policy": "per-path seed = base_seed + path index, shared across levels",
    }
    return RefinementTable("eps", eps_list, means, meta)


# ---------------------------------------------------------------------------
# Monte Carlo


def run_mc(
    ctx: OperatorContext,
    noise_model: NoiseModel,
    initial: InitialDatum,
    source: SourceSpec,
    n_paths: int,
    base_seed: int = 0,
    solver_cfg: SolverConfig | None = None,
    workers: int = 1,
) -> McSummary:
    """Monte Carlo over ``n_paths`` independent paths with per-path seeds.

    Paths may be computed by several worker threads; results land in
    arrays indexed by path and are reduced in fixed index order, so the
    summary is bit-identical no matter how many workers ran.
    """
    if n_paths < 2:
        raise ValueError(f"n_paths must be >= 2, got {n_paths}")
    M = ctx.params.M
    l2 = np.empty((n_paths, M + 1))
    viol = np.empty((n_paths, M + 1))

    def one(k: int) -> None:
        traj = run_path(
            ctx,
            noise_model,
            initial,
            source,
            seed=base_seed + k,
            cfg=solver_cfg,
            mode="thin",
        )
        l2[k] = traj.l2_norms
        viol[k] = traj.violations

    if workers <= 1:
        for k in range(n_paths):
            one(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(n_paths)))

    times = np.arange(M + 1) * ctx.params.tau
    var_l2 = l2.var(axis=0, ddof=1)
    var_viol = viol.var(axis=0, ddof=1)
    return McSummary(
        n_paths=n_paths,
        base_seed=base_seed,
        times=times,
        mean_l2=l2.mean(axis=0),
        var_l2=var_l2,
        hw_l2=1.96 * np.sqrt(var_l2 / n_paths),
        mean_violation=viol.mean(axis=0),
        var_violation=var_viol,
        hw_violation=1.96 * np.sqrt(var_viol / n_paths),
    )


def run_pathwise_refinement(
    ctx_coarse: OperatorContext,
    noise_model: NoiseModel,
    initial: InitialDatum,
    source: SourceSpec,
    levels: int = 3,
    seed: int = 0,
    solver_cfg: SolverConfig | None = None,
) -> RefinementTable:
    """Pathwise distance to the finest time level under one Brownian path.

    The finest level has M * 2^(levels-1) steps; every coarser level
    consumes the same path through increment aggregation.  The table
    reports the final-time L2 distance of each coarse run to the finest
    run; it is an observation, no rate is claimed.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    pr = ctx_coarse.params
    M_fine = pr.M * 2 ** (levels - 1)
    fine = noise_model.sample_path(M_fine, pr.T / M_fine, seed)
    runs = []
    taus = []
    for level in range(levels):
        params = replace(pr, M=pr.M * 2**level)
        ctx = OperatorContext(params, ctx_coarse.reaction, ctx_coarse.grid)
        incr = fine.coarsen(2 ** (levels - 1 - level))
        traj = run_path(
            ctx,
            noise_model,
            initial,
            source,
            seed=seed,
            cfg=solver_cfg,
            increments=incr,
        )
        runs.append(traj.final_state.values)
        taus.append(params.tau)
    ref = runs[-1]
    grid = ctx_coarse.grid
    errors = [norm_l2(grid.function(r - ref)) for r in runs[:-1]]
    meta = {
        "quantity": "final-time L2 distance to finest level, common random numbers",
        "fine_steps": M_fine,
        "seed": seed,
    }
    return RefinementTable("tau", taus[:-1], errors, meta)


# ---------------------------------------------------------------------------
# verification report


#: module invariants that verify_all must cover, by (module, invariant id)
CHECKLIST = {
    "mesh": ["summation_by_parts", "norm_w1p_p2_identity", "norm_homogeneity"],
    "model": [
        "penalty_monotone",
        "penalty_lipschitz",
        "penalty_vanishes_on_box",
        "potentials_match_fd",
        "params_gate",
    ],
    "noise": [
        "support_zero_outside",
        "truncation_decay",
        "forcing_reproducible",
        "hs_bound",
    ],
    "operator": [
        "coercivity",
        "strong_monotonicity",
        "weak_form_exact",
        "continuity_in_delta",
    ],
    "solver": [
        "uniqueness",
        "energy_nonincreasing",
        "converges_within_cap",
        "determinism",
    ],
    "stepper": [
        "scheme_residual",
        "noise_off_seed_independent",
        "warm_start_equivalence",
    ],
}


@dataclass
class VerificationReport:
    """Structured pass/fail verdicts with measured slacks and coverage map."""

    properties: list
    coverage: dict
    passed: bool
    seed: int

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "properties": self.properties,
            "coverage": self.coverage,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _record(props, coverage, name, module, covers, passed, measured, bound,
            direction="le"):
    """Append one property verdict; slack is positive when there is margin."""
    if measured is None or bound is None:
        slack = None
    elif direction == "le":
        slack = float(bound - measured)
    else:
        slack = float(measured - bound)
    props.append(
        {
            "property": name,
            "module": module,
            "passed": bool(passed),
            "measured": None if measured is None else float(measured),
            "bound": None if bound is None else float(bound),
            "slack": slack,
        }
    )
    for mod, inv in covers:
        coverage.setdefault(mod, {}).setdefault(inv, []).append(name)


def verify_all(
    grid: Grid1D | None = None,
    params: ModelParams | None = None,
    reaction: ReactionSpec | None = None,
    noise_model: NoiseModel | None = None,
    source: SourceSpec | None = None,
    initial: InitialDatum | None = None,
    solver_cfg: SolverConfig | None = None,
    seed: int = 0,
    cp_factor: float = 1.0,
    cp_samples: int = 200_000,
    stat_draws: int = 1_000_000,
) -> VerificationReport:
    """Run every computable inequality check and return the report.

    ``cp_factor`` scales the monotonicity constant 2^{2-p} used in the
    strong monotonicity check; anything above 1 corrupts the bound on
    purpose, as a self-test that the harness can fail.  Failures are data
    in the report, never exceptions.
    """
    grid = grid or Grid1D(32, 1.0)
    params = params or ModelParams(p=3.0, eps=0.1, T=0.5, M=50, L_beta=0.5)
    reaction = reaction or ReactionSpec("sine", 0.5)
    noise_model = noise_model or NoiseModel(J=12, sigma=0.5)
    source = source or SourceSpec("constant", {"value": 0.5})
    initial = initial or make_initial(grid, "cosine", {"offset": 0.5, "amp": 0.25})
    solver_cfg = solver_cfg or SolverConfig()
    rng = np.random.default_rng(seed)
    props: list = []
    coverage: dict = {}
    ctx = OperatorContext(params, reaction, grid)
    tau, lbeta, eps = params.tau, params.L_beta, params.eps
    p_values = sorted({2.0, 3.0, 4.0, params.p})

    def rand_field(lo=-1.5, hi=2.5):
        return grid.function(rng.uniform(lo, hi, grid.n_cells))

    # --- algebraic inequality constant
    est = estimate_cp(params.p, 1, cp_samples, seed)
    cp_bound = 2.0 ** (2.0 - params.p) * (1.0 - 1e-9)
    _record(
        props, coverage, "cp_infimum", "harness", [],
        est >= cp_bound, est, cp_bound, direction="ge",
    )

    # --- mesh identities
    u, v = rand_field(), rand_field()
    lhs = grid.h * np.dot(gradient(u).values, gradient(v).values)
    rhs = -inner(divergence(gradient(u)), v)
    sbp = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    _record(
        props, coverage, "mesh_summation_by_parts", "mesh",
        [("mesh", "summation_by_parts")], sbp <= 1e-12, sbp, 1e-12,
    )
    w1p2 = norm_w1p(u, 2.0)
    ident = norm_l2(u) ** 2 + grid.h * np.dot(gradient(u).values, gradient(u).values)
    rel = abs(w1p2 - ident) / max(abs(ident), 1e-300)
    _record(
        props, coverage, "mesh_norm_w1p_p2_identity", "mesh",
        [("mesh", "norm_w1p_p2_identity")], rel <= 1e-12, rel, 1e-12,
    )
    worst = 0.0
    for alpha in (-2.5, -1.0, 0.5, 3.0):
        au = grid.function(alpha * u.values)
        worst = max(
            worst,
            abs(norm_l2(au) - abs(alpha) * norm_l2(u)) / max(norm_l2(au), 1e-300),
        )
        for p in p_values:
            worst = max(
                worst,
                abs(norm_w1p(au, p) - abs(alpha) ** p * norm_w1p(u, p))
                / max(norm_w1p(au, p), 1e-300),
            )
    _record(
        props, coverage, "mesh_norm_homogeneity", "mesh",
        [("mesh", "norm_homogeneity")], worst <= 1e-12, worst, 1e-12,
    )

    # --- penalization and potentials
    samples = np.sort(rng.uniform(-2.0, 3.0, 4001))
    pen = yosida_penalty(samples, eps)
    monotone_viol = float(np.minimum(np.diff(pen), 0.0).min(initial=0.0))
    _record(
        props, coverage, "penalty_monotone", "model",
        [("model", "penalty_monotone")], monotone_viol >= 0.0, monotone_viol, 0.0,
        direction="ge",
    )
    pa, pb = rng.uniform(-2.0, 3.0, 4000), rng.uniform(-2.0, 3.0, 4000)
    lip_excess = float(
        (np.abs(yosida_penalty(pa, eps) - yosida_penalty(pb, eps))
         - np.abs(pa - pb) / eps).max()
    )
    _record(
        props, coverage, "penalty_lipschitz", "model",
        [("model", "penalty_lipschitz")], lip_excess <= 1e-12, lip_excess, 1e-12,
    )
    box = rng.uniform(0.0, 1.0, 2001)
    box_max = float(np.abs(yosida_penalty(box, eps)).max())
    _record(
        props, coverage, "penalty_vanishes_on_box", "model",
        [("model", "penalty_vanishes_on_box")], box_max == 0.0, box_max, 0.0,
    )
    step_fd = 1e-5
    pts = rng.uniform(-2.0, 3.0, 2000)
    pts = pts[(np.abs(pts) > 1e-3) & (np.abs(pts - 1.0) > 1e-3)]
    fd_psi = (
        yosida_potential(pts + step_fd, eps) - yosida_potential(pts - step_fd, eps)
    ) / (2 * step_fd)
    err_psi = float(np.abs(fd_psi - yosida_penalty(pts, eps)).max())
    fd_b = (
        reaction.antiderivative(pts + step_fd) - reaction.antiderivative(pts - step_fd)
    ) / (2 * step_fd)
    err_b = float(np.abs(fd_b - reaction.evaluate(pts)).max())
    err_fd = max(err_psi, err_b)
    _record(
        props, coverage, "potentials_match_fd", "model",
        [("model", "potentials_match_fd")], err_fd <= 1e-6, err_fd, 1e-6,
    )
    gate_hits = 0
    try:
        ModelParams(p=2.0, eps=0.1, T=1.0, M=10, L_beta=10.1)
    except ValueError:
        gate_hits += 1
    try:
        ModelParams(p=1.5, eps=0.1, T=1.0, M=10)
    except ValueError:
        gate_hits += 1
    _record(
        props, coverage, "params_gate", "model",
        [("model", "params_gate")], gate_hits == 2, gate_hits, 2, direction="ge",
    )

    # --- noise
    span = grid.function(np.linspace(-0.2, 1.2, grid.n_cells))
    dw_probe = rng.standard_normal(noise_model.J)
    forcing = noise_model.apply_diffusion(span, dw_probe)
    outside = (span.values <= 0.25) | (span.values >= 0.75)
    support_leak = float(np.abs(forcing.values[outside]).max(initial=0.0))
    _record(
        props, coverage, "noise_support", "noise",
        [("noise", "support_zero_outside")], support_leak == 0.0, support_leak, 0.0,
    )
    bigger = NoiseModel(J=noise_model.J + 1, sigma=noise_model.sigma)
    dw_ext = np.concatenate([dw_probe, [0.7]])
    mid = grid.function(np.linspace(0.26, 0.74, grid.n_cells))
    delta = bigger.apply_diffusion(mid, dw_ext).values - noise_model.apply_diffusion(
        mid, dw_probe
    ).values
    expected = bigger.amplitudes[-1] * 0.7 * bump_profile(mid.values)
    trunc_err = float(np.abs(delta - expected).max())
    trunc_tol = 1e-15 * max(1.0, float(np.abs(expected).max()))
    _record(
        props, coverage, "noise_truncation_decay", "noise",
        [("noise", "truncation_decay")], trunc_err <= trunc_tol, trunc_err, trunc_tol,
    )
    path_a = noise_model.sample_path(20, tau, seed + 3)
    path_b = noise_model.sample_path(20, tau, seed + 3)
    same = np.array_equal(path_a.values, path_b.values)
    _record(
        props, coverage, "noise_forcing_reproducible", "noise",
        [("noise", "forcing_reproducible")], same, 0.0 if same else 1.0, 0.0,
    )
    hs = noise_model.hs_lipschitz_estimate(100_000, seed=seed)
    _record(
        props, coverage, "noise_hs_bound", "noise",
        [("noise", "hs_bound")], hs <= noise_model.L_g, hs, noise_model.L_g,
    )
    draws = noise_model.sample_path(
        max(stat_draws // noise_model.J, 1), tau, seed + 4
    ).values
    mean_bound = 4.0 * np.sqrt(tau / draws.size)
    mean_abs = abs(float(draws.mean()))
    _record(
        props, coverage, "noise_increment_mean", "noise", [],
        mean_abs <= mean_bound, mean_abs, mean_bound,
    )
    var_rel = abs(float(draws.var()) / tau - 1.0)
    _record(
        props, coverage, "noise_increment_variance", "noise", [],
        var_rel <= 0.05, var_rel, 0.05,
    )

    # --- operator inequalities
    coercive_worst = np.inf
    monotone_worst = np.inf
    for p in p_values:
        pctx = OperatorContext(replace(params, p=p), reaction, grid)
        for _ in range(100):
            fu, fv = rand_field(), rand_field()
            au, av = pctx.apply(fu), pctx.apply(fv)
            lhs_c = inner(au, fu)
            rhs_c = (1 - tau * lbeta) * norm_l2(fu) ** 2 + tau * norm_w1p(fu, p)
            coercive_worst = min(
                coercive_worst,
                (lhs_c - rhs_c) / max(abs(lhs_c), abs(rhs_c), 1e-300),
            )
            dfield = grid.function(fu.values - fv.values)
            lhs_m = inner(grid.function(au.values - av.values), dfield)
            rhs_m = (1 - tau * lbeta) * norm_l2(dfield) ** 2 + tau * (
                cp_factor * 2.0 ** (2.0 - p)
            ) * norm_w1p(dfield, p)
            monotone_worst = min(
                monotone_worst,
                (lhs_m - rhs_m) / max(abs(lhs_m), abs(rhs_m), 1e-300),
            )
    _record(
        props, coverage, "operator_coercivity", "operator",
        [("operator", "coercivity")], coercive_worst >= -1e-10,
        coercive_worst, -1e-10, direction="ge",
    )
    _record(
        props, coverage, "operator_strong_monotonicity", "operator",
        [("operator", "strong_monotonicity")],
        monotone_worst >= -1e-10, monotone_worst, -1e-10, direction="ge",
    )
    fu, fv = rand_field(), rand_field()
    weak_lhs = inner(ctx.apply_plap(fu), fv)
    weak_rhs = grid.h * np.dot(ctx.face_flux(fu.values), gradient(fv).values) + inner(
        grid.function(np.abs(fu.values) ** (params.p - 2.0) * fu.values), fv
    )
    weak_rel = abs(weak_lhs - weak_rhs) / max(abs(weak_lhs), 1e-300)
    _record(
        props, coverage, "operator_weak_form", "operator",
        [("operator", "weak_form_exact")], weak_rel <= 1e-12, weak_rel, 1e-12,
    )
    deltas = [10.0 ** (-k) for k in range(1, 7)]
    base = ctx.apply(fu).values
    dists = [
        norm_l2(
            grid.function(
                ctx.apply(grid.function(fu.values + d * fv.values)).values - base
            )
        )
        for d in deltas
    ]
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    cont_bound = 1e-4 * max(1.0, dists[0])
    _record(
        props, coverage, "operator_continuity", "operator",
        [("operator", "continuity_in_delta")],
        decreasing and dists[-1] <= cont_bound, dists[-1], cont_bound,
    )

    # --- solver
    uniq_worst = 0.0
    energy_jump_worst = 0.0
    iter_worst = 0
    solves = []
    for _ in range(20):
        rhs_f = rand_field(lo=-1.0, hi=2.0)
        s1, rep1 = solve(ctx, rhs_f, guess=None, cfg=solver_cfg)
        s2, rep2 = solve(ctx, rhs_f, guess=rand_field(lo=-1.0, hi=2.0), cfg=solver_cfg)
        uniq_worst = max(uniq_worst, norm_l2(grid.function(s1.values - s2.values)))
        for rep in (rep1, rep2):
            hist = np.asarray(rep.energy_history)
            if hist.size > 1:
                scale = max(1.0, float(np.abs(hist).max()))
                energy_jump_worst = max(
                    energy_jump_worst, float(np.diff(hist).max()) / scale
                )
            iter_worst = max(iter_worst, rep.iterations)
        solves.append((rhs_f, s1))
    _record(
        props, coverage, "solver_uniqueness", "solver",
        [("solver", "uniqueness")], uniq_worst <= 1e-8, uniq_worst, 1e-8,
    )
    _record(
        props, coverage, "solver_energy_nonincreasing", "solver",
        [("solver", "energy_nonincreasing")],
        energy_jump_worst <= 1e-12, energy_jump_worst, 1e-12,
    )
    _record(
        props, coverage, "solver_converges_within_cap", "solver",
        [("solver", "converges_within_cap")],
        iter_worst <= solver_cfg.max_newton, iter_worst, solver_cfg.max_newton,
    )
    rhs_f = solves[0][0]
    d1, _ = solve(ctx, rhs_f, cfg=solver_cfg)
    d2, _ = solve(ctx, rhs_f, cfg=solver_cfg)
    det = np.array_equal(d1.values, d2.values)
    _record(
        props, coverage, "solver_determinism", "solver",
        [("solver", "determinism")], det, 0.0 if det else 1.0, 0.0,
    )
    stab_l2_worst = np.inf
    stab_v_worst = np.inf
    apriori_worst = np.inf
    for i in range(0, len(solves) - 1, 2):
        (r1, s1), (r2, s2) = solves[i], solves[i + 1]
        sl2, sv = stability_slacks(ctx, r1, r2, s1, s2)
        stab_l2_worst = min(stab_l2_worst, sl2)
        stab_v_worst = min(stab_v_worst, sv)
    for r, s in solves:
        bound = norm_l2(r) ** 2 / (4.0 * tau * (1.0 - tau * lbeta))
        apriori_worst = min(apriori_worst, bound - norm_w1p(s, params.p))
    _record(
        props, coverage, "solver_stability_l2", "solver", [],
        stab_l2_worst >= -1e-8, stab_l2_worst, -1e-8, direction="ge",
    )
    _record(
        props, coverage, "solver_stability_w1p", "solver", [],
        stab_v_worst >= -1e-8, stab_v_worst, -1e-8, direction="ge",
    )
    _record(
        props, coverage, "solver_apriori_bound", "solver", [],
        apriori_worst >= -1e-8, apriori_worst, -1e-8, direction="ge",
    )

    # --- stepper
    traj = run_path(ctx, noise_model, initial, source, seed=seed, cfg=solver_cfg)
    resid_worst = 0.0
    for n in range(params.M):
        u_n, u_np1 = traj.states[n], traj.states[n + 1]
        f_n = source.step_average(n, grid, tau)
        noise_term = noise_model.apply_diffusion(u_n, traj.increments.values[n])
        resid = (
            u_np1.values
            - u_n.values
            + tau * (ctx.apply_plap(u_np1).values + yosida_penalty(u_np1.values, eps))
            - noise_term.values
            - tau * (reaction.evaluate(u_np1.values) + f_n.values)
        )
        resid_worst = max(resid_worst, norm_l2(grid.function(resid)))
    _record(
        props, coverage, "stepper_scheme_residual", "stepper",
        [("stepper", "scheme_residual")],
        resid_worst <= 10 * solver_cfg.tol_residual,
        resid_worst, 10 * solver_cfg.tol_residual,
    )
    quiet = NoiseModel(J=noise_model.J, sigma=0.0)
    qa = run_path(ctx, quiet, initial, source, seed=1, cfg=solver_cfg)
    qb = run_path(ctx, quiet, initial, source, seed=2, cfg=solver_cfg)
    off_diff = max(
        float(np.abs(a.values - b.values).max()) for a, b in zip(qa.states, qb.states)
    )
    _record(
        props, coverage, "stepper_noise_off_seed_independent", "stepper",
        [("stepper", "noise_off_seed_independent")], off_diff == 0.0, off_diff, 0.0,
    )
    cold = initial.u0
    for n in range(params.M):
        f_n = source.step_average(n, grid, tau)
        forcing = noise_model.apply_diffusion(cold, traj.increments.values[n])
        rhs_n = grid.function(cold.values + forcing.values + tau * f_n.values)
        cold, _ = solve(ctx, rhs_n, guess=grid.zeros(), cfg=solver_cfg)
    warm_diff = norm_l2(grid.function(cold.values - traj.final_state.values))
    _record(
        props, coverage, "stepper_warm_start_equivalence", "stepper",
        [("stepper", "warm_start_equivalence")], warm_diff <= 1e-8, warm_diff, 1e-8,
    )

    # --- coverage completeness
    missing = [
        f"{mod}.{inv}"
        for mod, invs in CHECKLIST.items()
        for inv in invs
        if inv not in coverage.get(mod, {})
    ]
    _record(
        props, coverage, "coverage_complete", "harness", [],
        not missing, len(missing), 0,
    )

    passed = all(rec["passed"] for rec in props)
    return VerificationReport(props, coverage, passed, seed)
