import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_w_orthonormal
from egf import (
    DegenerateError,
    ForcingEnsemble,
    KernelConfig,
    ProblemSpec,
    RankError,
    ResponseEnsemble,
    densify,
    exact_kernel,
    fit_coefficients,
    learn_pod,
    make_interval_grid,
    pod_modes,
    relative_kernel_error,
    sample_gp,
    solve_ensemble,
)
from egf.solvers import POISSON_1D


def ensembles(g, F, E):
    return ForcingEnsemble(g, F), ResponseEnsemble(g, E)


def normal_equations_fit(phi, F, E, w):
    """Dense least squares over diag(Z) of sum_i ||u_i - Phi Z Phi^T W f_i||_W^2."""
    sw = np.sqrt(w)
    C = phi.T @ (w[:, None] * F)
    rows, rhs = [], []
    for i in range(F.shape[1]):
        rows.append((sw[:, None] * phi) * C[:, i])
        rhs.append(sw * E[:, i])
    Z, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(rhs), rcond=None)
    return Z


@settings(max_examples=30, deadline=None)
@given(n=st.integers(8, 50), k=st.integers(1, 5), m=st.integers(5, 30), seed=st.integers(0, 10**6))
def test_decoupled_fit_matches_normal_equations(n, k, m, seed):
    rng = np.random.default_rng(seed)
    g = make_interval_grid(0, 1, n)
    F = rng.standard_normal((n, m))
    E = rng.standard_normal((n, m))
    phi = random_w_orthonormal(g, k, rng)
    Z = fit_coefficients(phi, *ensembles(g, F, E))
    assert np.allclose(Z, normal_equations_fit(phi, F, E, g.weights), atol=1e-8, rtol=1e-8)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(10, 50), k=st.integers(1, 5), seed=st.integers(0, 10**6))
def test_pod_recovers_low_rank_operator_from_white_forcing(n, k, seed):
    # With W-white forcings (W^{1/2} F orthogonal) the POD basis is the eigenbasis,
    # so the diagonal fit is exact.
    rng = np.random.default_rng(seed)
    g = make_interval_grid(0, 1, n)
    phi = random_w_orthonormal(g, k, rng)
    sigma = np.arange(k, 0, -1) * rng.choice([-1, 1], k)
    G = (phi * sigma) @ phi.T
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    F = Q / g.sqrt_weights[:, None]
    E = G @ (g.weights[:, None] * F)
    model = learn_pod(*ensembles(g, F, E), k)
    assert np.allclose(densify(model), G, atol=1e-8 * np.abs(G).max())
    assert model.orthonormality_defect() < 1e-10


def test_pod_span_is_exact_for_generic_forcing():
    rng = np.random.default_rng(3)
    g = make_interval_grid(0, 1, 40)
    phi = random_w_orthonormal(g, 4, rng)
    G = (phi * np.array([4.0, -3.0, 2.0, 1.0])) @ phi.T
    F = rng.standard_normal((40, 25))
    model = learn_pod(*ensembles(g, F, G @ (g.weights[:, None] * F)), 4)
    # same subspace: projecting the true modes onto the learned ones loses nothing
    P = model.phi @ (model.phi.T @ (g.weights[:, None] * phi))
    assert np.allclose(P, phi, atol=1e-10)


def test_non_strict_rank_truncates_to_numerical_rank():
    g = make_interval_grid(0, 1, 40)
    rng = np.random.default_rng(0)
    E = rng.standard_normal((40, 3)) @ rng.standard_normal((3, 12))
    F = rng.standard_normal((40, 12))
    m = learn_pod(*ensembles(g, F, E), 6, strict=False)
    assert m.rank == 3 and m.info["requested_rank"] == 6


def test_modes_are_w_orthonormal_and_sign_fixed():
    g = make_interval_grid(0, 1, 120)
    E = np.random.default_rng(0).standard_normal((120, 40))
    phi, s = pod_modes(ResponseEnsemble(g, E), 10)
    assert np.allclose(phi.T @ (g.weights[:, None] * phi), np.eye(10), atol=1e-10)
    idx = np.argmax(np.abs(phi), axis=0)
    assert np.all(phi[idx, np.arange(10)] > 0)
    assert np.all(np.diff(s) <= 0)


def test_gram_and_svd_methods_agree():
    g = make_interval_grid(0, 1, 300)
    problem = ProblemSpec(POISSON_1D, g)
    F = sample_gp(g, KernelConfig(0.02), 200, seed=0)
    E = solve_ensemble(problem, F)
    a = learn_pod(F, E, 20, method="svd")
    b = learn_pod(F, E, 20, method="gram")
    assert np.allclose(a.sigma, b.sigma, rtol=1e-8)
    assert relative_kernel_error(a, b) < 1e-6


def test_auto_method_is_recorded_resolved():
    g = make_interval_grid(0, 1, 50)
    E = np.random.default_rng(0).standard_normal((50, 20))
    m = learn_pod(*ensembles(g, E, E), 5)
    assert m.info["pod_method"] == "svd"


def test_rank_deficient_ensemble_raises():
    g = make_interval_grid(0, 1, 40)
    v = np.random.default_rng(0).standard_normal((40, 1))
    E = v @ np.ones((1, 10))
    with pytest.raises(RankError):
        pod_modes(ResponseEnsemble(g, E), 2)


def test_forcing_orthogonal_to_all_modes_is_degenerate():
    g = make_interval_grid(0, 1, 40)
    E = np.random.default_rng(0).standard_normal((40, 10))
    phi, _ = pod_modes(ResponseEnsemble(g, E), 3)
    with pytest.raises(DegenerateError):
        fit_coefficients(phi, *ensembles(g, np.zeros((40, 10)), E))


@pytest.fixture(scope="module")
def poisson_pod():
    g = make_interval_grid(0, 1, 1000)
    problem = ProblemSpec(POISSON_1D, g)
    F = sample_gp(g, KernelConfig(5e-3), 1000, seed=0)
    E = solve_ensemble(problem, F)
    return g, learn_pod(F, E, 30), exact_kernel(problem)


def test_poisson_coefficients_follow_inverse_eigenvalues(poisson_pod):
    _, model, _ = poisson_pod
    k = np.arange(1, 11)
    assert np.allclose(model.sigma[:10] * (np.pi * k) ** 2, 1.0, atol=0.03)


def test_poisson_modes_contain_sines(poisson_pod):
    g, model, _ = poisson_pod
    w = g.weights
    for k in range(1, 11):
        s = np.sqrt(2) * np.sin(k * np.pi * g.x)
        coef = model.phi.T @ (w * s)
        resid = g.norm(s - model.phi @ coef) / g.norm(s)
        assert resid < 0.01, k


def test_poisson_kernel_error(poisson_pod):
    g, model, exact = poisson_pod
    assert relative_kernel_error(model, exact) < 3.0
