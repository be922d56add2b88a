import numpy as np
import pytest
import scipy.linalg

from plapsim.mesh import Grid1D, gradient, inner, norm_l2, norm_w1p
from plapsim.model import ModelParams, ReactionSpec
from plapsim.operators import OperatorContext, TridiagonalMatrix


def make_ctx(p=2.0, eps=0.1, tau=0.1, L_beta=0.0, reaction=None, n=8, length=1.0):
    params = ModelParams(p=p, eps=eps, T=tau * 10, M=10, L_beta=L_beta, length=length)
    return OperatorContext(params, reaction or ReactionSpec("zero"), Grid1D(n, length))


# ---------------------------------------------------------------------------
# tridiagonal matrix


def test_tridiagonal_matvec_and_solve():
    rng = np.random.default_rng(0)
    diag = rng.uniform(2.0, 3.0, 12)
    off = rng.uniform(-0.5, 0.5, 11)
    tri = TridiagonalMatrix(diag, off)
    dense = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    v = rng.normal(size=12)
    assert np.allclose(tri.matvec(v), dense @ v, rtol=1e-13)
    b = rng.normal(size=12)
    assert np.allclose(tri.solve(b), np.linalg.solve(dense, b), rtol=1e-12)
    assert np.array_equal(tri.lower, tri.upper)


# ---------------------------------------------------------------------------
# p-Laplace operator


def test_plap_zero_and_constant():
    ctx = make_ctx(p=3.0)
    g = ctx.grid
    assert np.all(ctx.apply_plap(g.zeros()).values == 0.0)
    c = 0.7
    out = ctx.apply_plap(g.function(np.full(8, c)))
    assert np.allclose(out.values, abs(c) ** 1.0 * c, rtol=1e-14)


def test_plap_hand_stencil_p2():
    # p = 2 on h = 1: -Laplacian + identity applied to (0, 1, 0)
    ctx = make_ctx(p=2.0, n=3, length=3.0)
    out = ctx.apply_plap(ctx.grid.function([0.0, 1.0, 0.0]))
    assert np.allclose(out.values, [-1.0, 3.0, -1.0], rtol=1e-14)


def test_plap_weak_form_identity():
    # h sum plap(u) v == h sum flux(u) grad(v) + h sum |u|^{p-2} u v exactly
    rng = np.random.default_rng(1)
    for p in (2.0, 3.0, 4.5):
        ctx = make_ctx(p=p, n=20, length=1.7)
        g = ctx.grid
        u = g.function(rng.normal(size=20))
        v = g.function(rng.normal(size=20))
        lhs = inner(ctx.apply_plap(u), v)
        rhs = g.h * np.dot(ctx.face_flux(u.values), gradient(v).values) + inner(
            g.function(np.abs(u.values) ** (p - 2.0) * u.values), v
        )
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)


# ---------------------------------------------------------------------------
# full operator


def test_apply_hand_values():
    ctx = make_ctx(p=2.0, eps=0.1, tau=0.1)
    g = ctx.grid
    assert np.all(ctx.apply(g.zeros()).values == 0.0)
    out = ctx.apply(g.function(np.full(8, 0.5)))
    assert np.allclose(out.values, 0.55, rtol=1e-14)
    out = ctx.apply(g.function(np.full(8, 1.2)))
    assert np.allclose(out.values, 1.52, rtol=1e-12)


def test_context_rejects_weak_margin():
    # the tau L_beta gate already fires at parameter construction
    with pytest.raises(ValueError):
        ModelParams(p=2.0, eps=0.1, T=1.0, M=10, L_beta=20.0)
    # a declared L_beta below the realized reaction scale is rejected by the
    # context, since every bound stated with L_beta would be unreliable
    params = ModelParams(p=2.0, eps=0.1, T=1.0, M=10, L_beta=0.0)
    with pytest.raises(ValueError):
        OperatorContext(params, ReactionSpec("linear", 2.0), Grid1D(8, 1.0))


# ---------------------------------------------------------------------------
# energy


def test_energy_zero():
    ctx = make_ctx(p=3.0)
    g = ctx.grid
    assert ctx.energy(g.zeros(), g.zeros()) == 0.0


def test_energy_gradient_matches_operator():
    # finite differences of the energy reproduce apply(u) - rhs cellwise
    rng = np.random.default_rng(2)
    for p, reaction in ((2.0, ReactionSpec("zero")),
                        (3.0, ReactionSpec("sine", 0.5)),
                        (4.0, ReactionSpec("linear", 0.5))):
        ctx = make_ctx(p=p, eps=0.1, tau=0.05, L_beta=0.5, reaction=reaction, n=16)
        g = ctx.grid
        u = g.function(rng.uniform(0.05, 0.95, 16))
        rhs = g.function(rng.normal(size=16))
        expected = ctx.apply(u).values - rhs.values
        step = 1e-6
        fd = np.empty(16)
        for i in range(16):
            up = u.values.copy()
            um = u.values.copy()
            up[i] += step
            um[i] -= step
            fd[i] = (ctx.energy(g.function(up), rhs) - ctx.energy(g.function(um), rhs)) / (
                2 * step * g.h
            )
        scale = max(1.0, np.abs(expected).max())
        assert np.abs(fd - expected).max() <= 1e-6 * scale


def test_energy_strict_minimum_at_solution():
    from plapsim.solver import solve

    rng = np.random.default_rng(3)
    ctx = make_ctx(p=3.0, eps=0.1, tau=0.1, n=12)
    g = ctx.grid
    rhs = g.function(rng.uniform(0.0, 1.5, 12))
    star, _ = solve(ctx, rhs)
    e_star = ctx.energy(star, rhs)
    for _ in range(20):
        v = rng.normal(size=12)
        v /= np.linalg.norm(v)
        perturbed = g.function(star.values + 1e-3 * v)
        assert ctx.energy(perturbed, rhs) > e_star


# ---------------------------------------------------------------------------
# Jacobian


def test_jacobian_structure_p2():
    # p = 2, state inside the box: identity + tau (3-point Laplacian + identity)
    ctx = make_ctx(p=2.0, eps=0.1, tau=0.1, n=6)
    g = ctx.grid
    tri = ctx.jacobian(g.function(np.full(6, 0.5)))
    h2 = g.h**2
    expected_diag = np.full(6, 1.0 + 0.1 * (2.0 / h2 + 1.0))
    expected_diag[[0, -1]] = 1.0 + 0.1 * (1.0 / h2 + 1.0)
    assert np.allclose(tri.diag, expected_diag, rtol=1e-13)
    assert np.allclose(tri.off, -0.1 / h2, rtol=1e-13)


def test_jacobian_matches_finite_differences():
    # central differences of apply along a direction, states inside (0.1, 0.9)
    rng = np.random.default_rng(4)
    for p in (2.0, 3.0, 4.0):
        ctx = make_ctx(p=p, eps=0.1, tau=0.05, L_beta=0.5,
                       reaction=ReactionSpec("sine", 0.5), n=32)
        g = ctx.grid
        u = g.function(rng.uniform(0.1, 0.9, 32))
        v = rng.normal(size=32)
        step = 1e-6
        fd = (
            ctx.apply(g.function(u.values + step * v)).values
            - ctx.apply(g.function(u.values - step * v)).values
        ) / (2 * step)
        jv = ctx.jacobian(u).matvec(v)
        assert np.abs(fd - jv).max() <= 1e-5 * max(1.0, np.abs(jv).max())


def test_jacobian_symmetric_positive_definite():
    # smallest eigenvalue stays above the monotonicity margin 1 - tau L_beta
    rng = np.random.default_rng(5)
    for p in (2.0, 3.0, 4.0):
        ctx = make_ctx(p=p, eps=0.05, tau=0.1, L_beta=5.0,
                       reaction=ReactionSpec("sine", 5.0), n=24)
        margin = 1.0 - 0.1 * 5.0
        for _ in range(5):
            u = ctx.grid.function(rng.uniform(-0.5, 1.5, 24))
            tri = ctx.jacobian(u)
            eigs = scipy.linalg.eigvalsh_tridiagonal(tri.diag, tri.off)
            assert eigs.min() >= margin - 1e-10


def test_jacobian_kink_derivative_choice():
    # penalty derivative contributes nothing at exactly 0 and 1
    ctx = make_ctx(p=2.0, eps=0.1, tau=0.1, n=4)
    u = ctx.grid.function([0.0, 1.0, 0.5, 0.5])
    tri = ctx.jacobian(u)
    inside = ctx.jacobian(ctx.grid.function([0.5, 0.5, 0.5, 0.5]))
    assert np.allclose(tri.diag, inside.diag, rtol=1e-13)


# ---------------------------------------------------------------------------
# inequalities


def test_discrete_coercivity():
    rng = np.random.default_rng(6)
    for p in (2.0, 3.0, 4.0):
        for L_beta in (0.0, 5.0, 9.0):
            reaction = ReactionSpec("linear", L_beta) if L_beta else ReactionSpec("zero")
            ctx = make_ctx(p=p, eps=0.1, tau=0.1, L_beta=L_beta, reaction=reaction,
                           n=16)
            margin = 1.0 - 0.1 * L_beta
            for _ in range(50):
                u = ctx.grid.function(rng.uniform(-1.5, 2.5, 16))
                lhs = inner(ctx.apply(u), u)
                rhs = margin * norm_l2(u) ** 2 + 0.1 * norm_w1p(u, p)
                assert lhs - rhs >= -1e-10 * max(abs(lhs), abs(rhs))


def test_discrete_strong_monotonicity():
    rng = np.random.default_rng(7)
    for p in (2.0, 3.0, 4.0):
        cp = 2.0 ** (2.0 - p)
        for L_beta in (0.0, 5.0, 9.0):
            reaction = ReactionSpec("linear", L_beta) if L_beta else ReactionSpec("zero")
            ctx = make_ctx(p=p, eps=0.1, tau=0.1, L_beta=L_beta, reaction=reaction,
                           n=16)
            margin = 1.0 - 0.1 * L_beta
            g = ctx.grid
            for _ in range(50):
                u = g.function(rng.uniform(-1.5, 2.5, 16))
                v = g.function(rng.uniform(-1.5, 2.5, 16))
                d = g.function(u.values - v.values)
                lhs = inner(g.function(ctx.apply(u).values - ctx.apply(v).values), d)
                rhs = margin * norm_l2(d) ** 2 + 0.1 * cp * norm_w1p(d, p)
                assert lhs - rhs >= -1e-10 * max(abs(lhs), abs(rhs))


def test_continuity_in_perturbation():
    # ||A(u + delta v) - A(u)|| decreases monotonically to zero with delta
    rng = np.random.default_rng(8)
    ctx = make_ctx(p=3.0, eps=0.1, tau=0.1, n=16)
    g = ctx.grid
    u = g.function(rng.uniform(-1.0, 2.0, 16))
    v = g.function(rng.normal(size=16))
    base = ctx.apply(u).values
    dists = []
    for k in range(1, 7):
        delta = 10.0**-k
        moved = ctx.apply(g.function(u.values + delta * v.values)).values
        dists.append(norm_l2(g.function(moved - base)))
    assert all(b < a for a, b in zip(dists, dists[1:]))
    assert dists[-1] <= 1e-4 * max(1.0, dists[0])
