import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from entrobust.optim.sdp import (
    Infeasible,
    NotConverged,
    SdpProblem,
    Unbounded,
    check_slackness,
    solve_sdp,
)
from entrobust.verify import random_feasible_sdp

TOL = 1e-8


def assert_contract(problem, sol, tol=TOL):
    assert sol.gap <= tol
    assert sol.gap >= -1e-8
    assert sol.slackness_residual <= np.sqrt(tol)
    assert sol.dual_residual <= 1e-7
    assert sol.primal_min_eig >= -1e-8
    assert sol.dual_min_eig >= -1e-8
    assert check_slackness(problem.F(sol.x), sol.Z) == pytest.approx(sol.slackness_residual, abs=1e-15)
    np.testing.assert_allclose(problem.trace_Fi(sol.Z), problem.c, atol=1e-7)


@pytest.mark.parametrize("a", [-3.0, 0.0, 2.5])
def test_scalar_lmi(a):
    problem = SdpProblem(c=[1.0], F0=[[-a]], Fi=[[[1.0]]])
    sol = solve_sdp(problem, TOL)
    assert sol.x[0] == pytest.approx(a, abs=1e-7)
    assert_contract(problem, sol)


def random_lp(rng, n, m):
    """Bounded, feasible LP ``min c.x, A x <= b`` including a box ``|x| <= 5``."""
    A = np.vstack([rng.standard_normal((m, n)), np.eye(n), -np.eye(n)])
    x_in = rng.uniform(-1, 1, n)
    b = np.concatenate([A[:m] @ x_in + rng.uniform(0.1, 1, m), np.full(2 * n, 5.0)])
    return rng.standard_normal(n), A, b


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 8))
def test_diagonal_sdp_matches_simplex(seed, n, m):
    c, A, b = random_lp(np.random.default_rng(seed), n, m)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs-ds")
    assert ref.status == 0
    # F(x) = diag(b - A x) >= 0
    Fi = np.array([np.diag(-A[:, i]) for i in range(n)])
    problem = SdpProblem(c=c, F0=np.diag(b), Fi=Fi)
    sol = solve_sdp(problem, TOL)
    assert sol.p_star == pytest.approx(ref.fun, abs=1e-7)
    assert_contract(problem, sol)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_largest_eigenvalue_of_complex_hermitian(seed, n):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = g + g.conj().T
    # minimize t subject to t I - H >= 0
    problem = SdpProblem(c=[1.0], F0=-H, Fi=np.eye(n)[None])
    sol = solve_sdp(problem, TOL)
    w, v = np.linalg.eigh(H)
    assert sol.x[0] == pytest.approx(w[-1], abs=1e-7)
    assert_contract(problem, sol)
    if w[-1] - w[-2] > 1e-3:
        # the dual optimum is the top eigenprojector
        np.testing.assert_allclose(sol.Z, np.outer(v[:, -1], v[:, -1].conj()), atol=1e-4)


def test_block_diagonal_problem_decouples():
    rng = np.random.default_rng(5)
    H1 = rng.standard_normal((3, 3))
    H1 = H1 + H1.T
    H2 = rng.standard_normal((4, 4))
    H2 = H2 + H2.T
    F0 = np.zeros((7, 7))
    F0[:3, :3] = -H1
    F0[3:, 3:] = -H2
    Fi = np.zeros((2, 7, 7))
    Fi[0, :3, :3] = np.eye(3)
    Fi[1, 3:, 3:] = np.eye(4)
    sol = solve_sdp(SdpProblem(c=[1.0, 1.0], F0=F0, Fi=Fi), TOL)
    np.testing.assert_allclose(sol.x, [np.linalg.eigvalsh(H1)[-1], np.linalg.eigvalsh(H2)[-1]], atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weak_duality_on_every_feasible_iterate(seed):
    problem, x0, Z0 = random_feasible_sdp(np.random.default_rng(seed))
    sol = solve_sdp(problem, TOL, x0=x0, Z0=Z0)
    assert min(h["gap"] for h in sol.history) >= -1e-8
    assert_contract(problem, sol)
    cold = solve_sdp(problem, TOL)
    assert cold.p_star == pytest.approx(sol.p_star, abs=1e-6)


def test_infeasible_toy_problem():
    # diag(x - 1, -x - 1) >= 0 has no solution
    problem = SdpProblem(c=[1.0], F0=-np.eye(2), Fi=np.diag([1.0, -1.0])[None])
    with pytest.raises(Infeasible) as info:
        solve_sdp(problem, TOL)
    Z = info.value.certificate
    assert np.linalg.eigvalsh(Z).min() >= -1e-10
    assert abs(problem.trace_Fi(Z)[0]) <= 1e-8
    assert np.trace(problem.F0 @ Z).real < 0


def test_unbounded_toy_problem():
    # minimize -x subject to x >= 1
    problem = SdpProblem(c=[-1.0], F0=[[-1.0]], Fi=[[[1.0]]])
    with pytest.raises(Unbounded):
        solve_sdp(problem, TOL)


def test_iteration_cap():
    problem, _, _ = random_feasible_sdp(np.random.default_rng(0))
    with pytest.raises(NotConverged) as info:
        solve_sdp(problem, TOL, max_iter=1)
    assert info.value.diagnostics["iterations"] == 1


def test_bad_start_is_rejected():
    problem, x0, Z0 = random_feasible_sdp(np.random.default_rng(1))
    with pytest.raises(ValueError):
        solve_sdp(problem, TOL, x0=x0, Z0=-Z0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"c": [1.0, 2.0], "F0": np.eye(2), "Fi": [np.eye(2)]},
        {"c": [1.0], "F0": np.ones((2, 3)), "Fi": [np.eye(2)]},
        {"c": [1.0], "F0": [[0, 1], [0, 0]], "Fi": [np.eye(2)]},
        {"c": [np.nan], "F0": np.eye(2), "Fi": [np.eye(2)]},
    ],
)
def test_problem_validation(kwargs):
    with pytest.raises(ValueError):
        SdpProblem(**kwargs)


def test_tolerance_must_be_positive():
    with pytest.raises(ValueError):
        solve_sdp(SdpProblem(c=[1.0], F0=[[0.0]], Fi=[[[1.0]]]), 0.0)


def test_check_slackness():
    assert check_slackness(np.zeros((3, 3)), np.eye(3)) == 0.0
    a = np.diag([1.0, 0.0, 0.0])
    b = np.diag([0.0, 2.0, 3.0])
    assert check_slackness(a, b) <= 1e-12
    u = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))[0]
    assert check_slackness(u @ a @ u.T, u @ b @ u.T) <= 1e-12
    assert check_slackness(np.eye(2), np.eye(2)) == pytest.approx(np.sqrt(2))
