import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrobust.analytic import (
    RankDeficientError,
    WitnessPlan,
    bd23_closed_form,
    bd23_max_denominator,
    bd_triangle,
    icd_lambdas,
    icd_wootters,
    multi_iso_robustness,
    robustness_analytic,
    robustness_bd,
    robustness_bd23,
    robustness_horo33,
    robustness_icd,
    robustness_isotropic,
    robustness_multi_iso,
    robustness_werner,
    robustness_wootters,
    verify_pseudomixture,
)
from entrobust.linalg import DensityMatrix, min_eigenvalue, partial_transpose_matrix, projector
from entrobust.separability import bd23_separable
from entrobust.states import (
    SPIN_FLIP,
    Bd23Params,
    BdParams,
    Horo33Params,
    IcdParams,
    IsotropicParams,
    MultiIsoParams,
    WernerParams,
    bd_state,
    concurrence,
    family_state,
    icd_state,
    random_density_matrix,
    random_simplex,
    wootters_decompose,
)

WITNESS_TOL = 1e-8


def entangled_bd(rng):
    while True:
        p = random_simplex(rng, 4)
        if p.max() > 0.5 + 1e-6:
            return BdParams(p)


def assert_witnesses(res, rho, boundary=True):
    assert verify_pseudomixture(rho, res.rho_prime, res.rho_dprime, res.s) <= 1e-9
    assert res.flags["prime_separable"] and res.flags["dprime_separable"]
    if boundary:
        assert res.flags["prime_on_boundary"] and res.flags["dprime_on_boundary"]


# ---------------------------------------------------------------------------
# Bell-diagonal


def test_bd_reference_value():
    res = robustness_bd(BdParams((0.7, 0.1, 0.1, 0.1)))
    assert res.s == pytest.approx(0.4, abs=1e-15)
    np.testing.assert_allclose(np.diag(res.rho_dprime.matrix.real).sum(), 1.0)
    assert res.certificates["mixing_weight"] == pytest.approx(1 / 1.4)
    assert res.plan.vertices == ("A", "B", "C")
    assert_witnesses(res, bd_state(BdParams((0.7, 0.1, 0.1, 0.1))))


@pytest.mark.parametrize("k", range(4))
def test_bd_singlet_like(k):
    p = np.zeros(4)
    p[k] = 1.0
    assert robustness_bd(BdParams(p)).s == pytest.approx(1.0)


@pytest.mark.parametrize("p", [(0.5, 0.5, 0, 0), (0.25,) * 4, (0.4, 0.3, 0.2, 0.1)])
def test_bd_separable_input(p):
    res = robustness_bd(BdParams(p))
    assert res.s == 0.0
    assert res.flags == {"separable_input": True}
    assert res.rho_prime is res.rho_dprime


def test_bd_triangle_vertices_normalized():
    tri = bd_triangle((0.7, 0.15, 0.1, 0.05))
    np.testing.assert_allclose(tri.sum(axis=1), 1.0, atol=1e-15)
    np.testing.assert_allclose(tri[:, 0], 0.5)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bd_permutation_covariance(seed):
    rng = np.random.default_rng(seed)
    params = entangled_bd(rng)
    perm = rng.permutation(4)
    a = robustness_bd(params)
    b = robustness_bd(BdParams(np.asarray(params.p)[perm]))
    assert a.s == pytest.approx(b.s, abs=1e-15)
    assert a.s == pytest.approx(2 * max(params.p) - 1, abs=1e-15)
    assert_witnesses(a, bd_state(params))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_wootters_on_bd_equals_closed_form(seed):
    params = entangled_bd(np.random.default_rng(seed))
    rho = bd_state(params)
    if min(params.p) < 1e-6:
        return
    w = robustness_wootters(rho)
    assert w.s == pytest.approx(robustness_bd(params).s, abs=1e-10)
    assert w.s == pytest.approx(concurrence(rho), abs=1e-10)


# ---------------------------------------------------------------------------
# Wootters basis


def random_entangled(rng):
    while True:
        rho = random_density_matrix(rng)
        if concurrence(rho) > 1e-3:
            return rho


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_wootters_witnesses(seed):
    rho = random_entangled(np.random.default_rng(seed))
    res = robustness_wootters(rho)
    wd = wootters_decompose(rho)
    K = np.sort(wd.K[1:])
    assert res.s == pytest.approx(wd.C * (K[0] + K[1]) / 2, rel=1e-12)
    assert concurrence(res.rho_prime) <= WITNESS_TOL
    assert concurrence(res.rho_dprime) <= WITNESS_TOL
    assert abs(res.certificates["lambda_dprime_1"]) <= WITNESS_TOL
    assert abs(res.certificates["plane_boundary_residual"]) <= 1e-12
    assert_witnesses(res, rho)


def test_wootters_rank_deficient():
    psi = np.array([0.6, 0, 0, 0.8])
    with pytest.raises(RankDeficientError):
        robustness_wootters(DensityMatrix(projector(psi), (2, 2)))


def test_wootters_separable_input():
    res = robustness_wootters(DensityMatrix(np.eye(4) / 4, (2, 2)))
    assert res.s == 0.0 and res.flags["separable_input"]


# ---------------------------------------------------------------------------
# theta-rotated family


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, np.pi / 2 - 0.05))
def test_icd_closed_form_matches_numeric_decomposition(seed, theta):
    params = IcdParams(theta, random_simplex(np.random.default_rng(seed), 4))
    if min(params.p) < 1e-4:
        return
    lam, K = icd_lambdas(params)
    wd = wootters_decompose(icd_state(params))
    order = np.argsort(-lam)
    np.testing.assert_allclose(lam[order], wd.lam, atol=1e-10)
    # K is only determined per lambda when the lambda values are distinct
    if np.min(np.abs(np.diff(lam[order]))) > 1e-6:
        np.testing.assert_allclose(K[order], wd.K, rtol=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, np.pi / 2 - 0.05))
def test_icd_analytic_equals_numeric_wootters(seed, theta):
    params = IcdParams(theta, random_simplex(np.random.default_rng(seed), 4))
    if min(params.p) < 1e-4:
        return
    rho = icd_state(params)
    if concurrence(rho) < 1e-6:
        return
    a = robustness_icd(params)
    assert a.s == pytest.approx(robustness_wootters(rho).s, abs=1e-10)
    assert_witnesses(a, rho)


def test_icd_wootters_vectors():
    params = IcdParams(np.pi / 6, (0.7, 0.1, 0.1, 0.1))
    wd = icd_wootters(params)
    x = wd.basis
    np.testing.assert_allclose(x @ x.conj().T, icd_state(params).matrix, atol=1e-15)
    np.testing.assert_allclose(x.conj().T @ SPIN_FLIP @ x.conj(), np.diag(wd.lam), atol=1e-15)


def test_icd_bell_angle_reduces_to_bd():
    p = (0.1, 0.2, 0.65, 0.05)
    assert robustness_icd(IcdParams(np.pi / 4, p)).s == pytest.approx(robustness_bd(BdParams(p)).s, abs=1e-12)


def test_icd_reference_value():
    # C = lambda_1 - lambda_2 - lambda_3 - lambda_4 and min K sum / 2 = 1 at this point
    params = IcdParams(np.pi / 6, (0.7, 0.1, 0.1, 0.1))
    s3 = np.sqrt(3) / 2
    l1 = 0.5 * (0.6 * s3 + np.sqrt(0.28 + 0.36 * 0.75))
    l2 = 0.5 * (-0.6 * s3 + np.sqrt(0.28 + 0.36 * 0.75))
    C = l1 - l2 - 2 * 0.1
    K34 = 0.2 / 0.2
    assert robustness_icd(params).s == pytest.approx(C * K34, abs=1e-14)
    assert robustness_icd(params).s == pytest.approx(0.3196152422706632, abs=1e-14)


# ---------------------------------------------------------------------------
# 2 x 3 family


@pytest.mark.parametrize(
    "p, s",
    [((0.6, 0.0, 0.1, 0.1, 0.1, 0.1), 0.24), ((0.5, 0.0, 0.125, 0.125, 0.125, 0.125), 9 / 56)],
)
def test_bd23_spot_values(p, s):
    assert bd23_closed_form(p) == pytest.approx(s, abs=1e-14)
    assert robustness_bd23(Bd23Params(p)).s == pytest.approx(s, abs=1e-14)


def test_bd23_denominator_maximum_by_hand():
    # a = 0.6, b = c = 0.2: the ratio is largest at an endpoint of the curve, D = 0.2
    dmax, pdd = bd23_max_denominator(np.array([0.6, 0, 0.1, 0.1, 0.1, 0.1]))
    assert dmax == pytest.approx(0.2, abs=1e-12)
    assert bd23_separable(Bd23Params(pdd)).margin == pytest.approx(0.0, abs=1e-12)
    res = robustness_bd23(Bd23Params((0.6, 0, 0.1, 0.1, 0.1, 0.1)))
    assert res.certificates["s_denominator_max"] == pytest.approx(1.6, abs=1e-10)
    assert not res.flags["witness_consistent"]


def test_bd23_chamber_symmetry():
    p = np.array([0.6, 0.0, 0.1, 0.1, 0.1, 0.1])
    shifted = np.roll(p, 2)[[0, 1, 3, 2, 4, 5]]
    assert robustness_bd23(Bd23Params(shifted)).s == pytest.approx(0.24, abs=1e-14)


def test_bd23_separable_input():
    res = robustness_bd23(Bd23Params([1 / 6] * 6))
    assert res.s == 0.0 and res.flags["separable_input"]


# ---------------------------------------------------------------------------
# one-parameter families


@pytest.mark.parametrize(
    "fn, desc, s",
    [
        (robustness_werner, WernerParams(3, -0.5), 0.5),
        (robustness_werner, WernerParams(2, -1.0), 1.0),
        (robustness_isotropic, IsotropicParams(2, 1.0), 1.0),
        (robustness_isotropic, IsotropicParams(3, 1.0), 2.0),
        (robustness_horo33, Horo33Params(5.0), 2 / 3),
        (robustness_horo33, Horo33Params(4.0), 1 / 3),
        (robustness_multi_iso, MultiIsoParams(2, 2, 1.0), 1.0),
        (robustness_multi_iso, MultiIsoParams(2, 3, 1.0), 7 / 3),
    ],
)
def test_one_parameter_reference_values(fn, desc, s):
    res = fn(desc)
    assert res.s == pytest.approx(s, abs=1e-14)
    assert res.certificates["pseudomixture_residual"] <= 1e-9


@pytest.mark.parametrize(
    "desc", [WernerParams(2, 0.0), IsotropicParams(3, 1 / 3), Horo33Params(3.0), MultiIsoParams(2, 3, 0.2), WernerParams(2, 0.5)]
)
def test_one_parameter_boundary_and_separable(desc):
    res = robustness_analytic(desc)
    assert res.s == 0.0
    assert res.flags["separable_input"]


@pytest.mark.parametrize("desc", [WernerParams(3, -0.7), IsotropicParams(4, 0.6), MultiIsoParams(3, 2, 0.8)])
def test_one_parameter_witnesses(desc):
    assert_witnesses(robustness_analytic(desc), family_state(desc))


def test_horo33_mixed_in_state_is_not_separable():
    res = robustness_horo33(Horo33Params(5.0))
    assert res.certificates["pseudomixture_residual"] <= 1e-15
    assert res.certificates["t_dprime"] == 0.0
    assert res.certificates["dprime_pt_min_eig"] < -0.03
    assert not res.flags["dprime_separable"]


def test_multi_iso_two_qubits_equals_isotropic():
    for r in np.linspace(0.4, 1.0, 7):
        a = robustness_multi_iso(MultiIsoParams(2, 2, r)).s
        b = robustness_isotropic(IsotropicParams(2, (1 + 3 * r) / 4)).s
        assert a == pytest.approx(b, abs=1e-12)
    assert multi_iso_robustness(2, 3, 0.2) == 0.0


# ---------------------------------------------------------------------------
# pseudomixture and plans


def test_pseudomixture_sensitivity():
    params = BdParams((0.7, 0.1, 0.1, 0.1))
    res = robustness_bd(params)
    rho = bd_state(params)
    assert verify_pseudomixture(rho, res.rho_prime, res.rho_dprime, res.s) <= 1e-9
    assert verify_pseudomixture(rho, res.rho_prime, res.rho_dprime, res.s + 1e-3) > 1e-4
    with pytest.raises(ValueError):
        verify_pseudomixture(rho, np.eye(6) / 6, res.rho_dprime, res.s)


def test_werner_pseudomixture():
    res = robustness_werner(WernerParams(4, -0.3))
    assert res.certificates["pseudomixture_residual"] <= 1e-9


def test_witness_plan_validation():
    WitnessPlan((0.5, 0.5), ("A", "B"), "x")
    with pytest.raises(ValueError):
        WitnessPlan((0.5, 0.6), ("A", "B"), "x")
    with pytest.raises(ValueError):
        WitnessPlan((1.0,), ("A", "B"), "x")


def test_witness_pt_margins_on_bd():
    res = robustness_bd(BdParams((0.9, 0.05, 0.03, 0.02)))
    assert min_eigenvalue(partial_transpose_matrix(res.rho_prime.matrix, (2, 2))) == pytest.approx(0.0, abs=1e-12)
    assert min_eigenvalue(res.rho_dprime.matrix) == pytest.approx(0.0, abs=1e-12)
