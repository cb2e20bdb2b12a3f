import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from entrobust.analytic import robustness_bd, robustness_wootters, verify_pseudomixture
from entrobust.linalg import DensityMatrix, min_eigenvalue, partial_transpose_matrix, projector
from entrobust.optim.ppt import (
    hermitian_basis,
    hermitian_coordinates,
    optimal_mixing_weight,
    ppt_robustness_problem,
    ppt_robustness_start,
    robustness_ppt_sdp,
)
from entrobust.optim.sdp import solve_sdp
from entrobust.states import (
    BdParams,
    Horo33Params,
    IsotropicParams,
    WernerParams,
    bd_state,
    concurrence,
    family_state,
    random_density_matrix,
    random_simplex,
    werner,
)

SINGLET = DensityMatrix(projector(np.array([0, 1, -1, 0]) / np.sqrt(2)), (2, 2))


def lambda_min_oracle(rho, rho_prime):
    """Largest L with rho' - L rho >= 0 for full-rank rho: lambda_min(rho^-1/2 rho' rho^-1/2)."""
    return sla.eigh(rho_prime.matrix, rho.matrix, eigvals_only=True)[0]


def assert_sdp_witnesses(rho, res):
    assert verify_pseudomixture(rho, res.rho_prime, res.rho_dprime, res.s) <= 1e-7
    for w in (res.rho_prime, res.rho_dprime):
        assert min_eigenvalue(w.matrix) >= -1e-7
        assert min_eigenvalue(partial_transpose_matrix(w.matrix, w.dims)) >= -1e-7
    assert abs(res.certificates["prime_pt_min_eig"]) <= 1e-6


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_hermitian_basis_is_orthonormal(n):
    B = hermitian_basis(n)
    assert B.shape == (n * n, n, n)
    gram = np.einsum("iab,jba->ij", B, B).real
    np.testing.assert_allclose(gram, np.eye(n * n), atol=1e-15)
    m = random_density_matrix(np.random.default_rng(n), n, (n,)).matrix
    np.testing.assert_allclose(np.tensordot(hermitian_coordinates(m), B, axes=1), m, atol=1e-15)


def test_singlet():
    res = robustness_ppt_sdp(SINGLET)
    assert res.s == pytest.approx(1.0, abs=1e-6)
    assert not res.flags["ppt_lower_bound"]
    assert_sdp_witnesses(SINGLET, res)


def test_serialized_singlet_problem_objective():
    problem = ppt_robustness_problem(SINGLET)
    x0, Z0 = ppt_robustness_start(4)
    sol = solve_sdp(problem, 1e-8, x0=x0, Z0=Z0)
    assert sol.p_star == pytest.approx(1.0, abs=1e-6)
    assert solve_sdp(problem, 1e-8).p_star == pytest.approx(1.0, abs=1e-6)


def test_maximally_mixed_is_separable():
    res = robustness_ppt_sdp(DensityMatrix(np.eye(4) / 4, (2, 2)))
    assert res.s == 0.0
    assert res.flags["separable_input"]


@pytest.mark.parametrize("f", [-0.25, -0.5, -1.0])
def test_two_qubit_werner(f):
    rho = werner(WernerParams(2, f))
    res = robustness_ppt_sdp(rho)
    assert res.s == pytest.approx(-f, abs=1e-6)
    assert_sdp_witnesses(rho, res)


@pytest.mark.parametrize(
    "desc, s",
    [(WernerParams(3, -0.5), 0.5), (IsotropicParams(3, 1.0), 2.0), (IsotropicParams(3, 0.6), 0.8)],
)
def test_three_by_three_lower_bounds_are_tight_for_symmetric_families(desc, s):
    res = robustness_ppt_sdp(family_state(desc))
    assert res.flags["ppt_lower_bound"]
    assert res.s == pytest.approx(s, abs=1e-6)


def test_bound_entangled_state_has_zero_ppt_robustness():
    res = robustness_ppt_sdp(family_state(Horo33Params(3.5)))
    assert res.s == 0.0
    assert res.flags["separable_input"] and res.flags["ppt_lower_bound"]


def test_non_bipartite_rejected():
    with pytest.raises(ValueError):
        robustness_ppt_sdp(DensityMatrix(np.eye(8) / 8, (2, 2, 2)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sdp_never_exceeds_wootters_formula(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(rng)
    if concurrence(rho) < 1e-4:
        return
    res = robustness_ppt_sdp(rho)
    assert res.s <= robustness_wootters(rho).s + 1e-6
    assert_sdp_witnesses(rho, res)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mixing_weight_bd(seed):
    rng = np.random.default_rng(seed)
    p = random_simplex(rng, 4)
    if p.max() < 0.5 + 1e-3 or p.min() < 1e-3:
        return
    params = BdParams(p)
    rho = bd_state(params)
    a = robustness_bd(params)
    lam = optimal_mixing_weight(rho, a.rho_prime)
    assert lam == pytest.approx(lambda_min_oracle(rho, a.rho_prime), abs=1e-7)
    assert lam == pytest.approx(1 / (1 + a.s), abs=1e-7)
    assert 1 / lam - 1 == pytest.approx(robustness_ppt_sdp(rho).s, abs=1e-6)


def test_mixing_weight_generic_two_by_three():
    rng = np.random.default_rng(4)
    rho = random_density_matrix(rng, 6, (2, 3))
    rp = random_density_matrix(rng, 6, (2, 3))
    assert optimal_mixing_weight(rho, rp) == pytest.approx(lambda_min_oracle(rho, rp), abs=1e-7)
