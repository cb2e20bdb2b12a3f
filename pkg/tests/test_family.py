import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from entrobust.analytic import robustness_icd
from entrobust.optim.family import (
    bd23_cone_lp,
    interval_bisection,
    interval_endpoints,
    polytope_bisection,
    polytope_lp,
    robustness_family_lp,
    robustness_tetrahedron_lp,
)
from entrobust.optim.ppt import robustness_ppt_sdp
from entrobust.separability import bd23_separable
from entrobust.states import (
    Bd23Params,
    BdParams,
    Horo33Params,
    IcdParams,
    IsotropicParams,
    MultiIsoParams,
    WernerParams,
    family_state,
    random_density_matrix,
    random_simplex,
)


def assert_lp_witnesses(res):
    assert res.certificates["pseudomixture_residual"] <= 1e-9
    assert res.flags["prime_separable"] and res.flags["dprime_separable"]


@pytest.mark.parametrize("method", ["direct", "bisection"])
@pytest.mark.parametrize(
    "desc, s",
    [
        (BdParams((0.7, 0.1, 0.1, 0.1)), 0.4),
        (BdParams((0.05, 0.05, 0.1, 0.8)), 0.6),
        (WernerParams(3, -0.5), 0.5),
        (IsotropicParams(3, 1.0), 2.0),
        (MultiIsoParams(2, 3, 1.0), 7 / 3),
        (MultiIsoParams(2, 2, 1.0), 1.0),
        # alpha = 5: near endpoint 3, far endpoint 2, (5 - 3) / (3 - 2)
        (Horo33Params(5.0), 2.0),
    ],
)
def test_reference_values(desc, s, method):
    res = robustness_family_lp(desc, method)
    assert res.s == pytest.approx(s, abs=1e-9)
    assert res.method == "family-lp"
    assert_lp_witnesses(res)


@pytest.mark.parametrize(
    "desc",
    [BdParams((0.25,) * 4), WernerParams(2, 0.5), IsotropicParams(2, 0.5), Bd23Params([1 / 6] * 6), IcdParams(0.3, (0.25,) * 4)],
)
def test_separable_inputs(desc):
    res = robustness_family_lp(desc)
    assert res.s == 0.0 and res.flags["separable_input"]


def test_unknown_method():
    with pytest.raises(ValueError):
        robustness_family_lp(BdParams((0.7, 0.1, 0.1, 0.1)), "simplex")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_polytope_lp_matches_bisection(seed):
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.uniform(0.01, 1, 4))[::-1]
    lam[0] = lam[1:].sum() + rng.uniform(0.01, 1)
    K = rng.uniform(0.5, 2, 4)
    s1, u1 = polytope_lp(lam, K)
    s2, _ = polytope_bisection(lam, K)
    assert s1 == pytest.approx(s2, abs=1e-9)
    assert s1 == pytest.approx(K @ u1, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 2))
def test_interval_endpoints_match_bisection(t, width):
    lo, hi = 0.0, width
    if lo <= t <= hi:
        return
    a = interval_endpoints(lo, hi, t)
    b = interval_bisection(lo, hi, t)
    np.testing.assert_allclose(a[:2], b[:2], atol=1e-9)
    # t'' = ((1 + s) t' - t) / s amplifies the bisection error in s by 1/s
    assert a[2] == pytest.approx(b[2], abs=1e-9 * max(1.0, 1.0 / a[0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, np.pi / 2 - 0.05))
def test_icd_lp_equals_closed_form(seed, theta):
    desc = IcdParams(theta, random_simplex(np.random.default_rng(seed), 4))
    if min(desc.p) < 1e-4:
        return
    lp = robustness_family_lp(desc)
    assert lp.s == pytest.approx(robustness_icd(desc).s, abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tetrahedron_lp_dominates_sdp(seed):
    rho = random_density_matrix(np.random.default_rng(seed))
    lp = robustness_tetrahedron_lp(rho)
    if lp.flags["separable_input"]:
        return
    assert lp.s >= robustness_ppt_sdp(rho).s - 1e-6
    assert_lp_witnesses(lp)


def bd23_oracle(p):
    """Same program with the cone written as tot_b tot_c >= diff^2, solved by SLSQP."""

    def cone(v):
        pair = v.reshape(3, 2)
        diff, tot = pair[:, 0] - pair[:, 1], pair.sum(axis=1)
        return np.array([tot[(k + 1) % 3] * tot[(k + 2) % 3] - diff[k] ** 2 for k in range(3)])

    cons = [{"type": "ineq", "fun": cone}, {"type": "ineq", "fun": lambda u: cone(p + u)}]
    best = np.inf
    for u0 in (np.full(6, 0.5), np.array([0, 1, 1, 1, 1, 1.0]), np.array([0, 0, 1, 1, 1, 1.0])):
        r = minimize(np.sum, u0, method="SLSQP", bounds=[(0, None)] * 6, constraints=cons, options={"ftol": 1e-13, "maxiter": 500})
        if r.success and min(cone(r.x).min(), cone(p + r.x).min()) >= -1e-9:
            best = min(best, r.fun)
    return best


@pytest.mark.parametrize("seed", range(6))
def test_bd23_cutting_planes_match_nonlinear_solver(seed):
    rng = np.random.default_rng(seed)
    while True:
        p = random_simplex(rng, 6)
        if not bd23_separable(Bd23Params(p)).separable:
            break
    s, u, n_lp = bd23_cone_lp(p)
    assert s == pytest.approx(bd23_oracle(p), abs=1e-6)
    assert n_lp < 100


def test_bd23_spot_point():
    res = robustness_family_lp(Bd23Params((0.6, 0, 0.1, 0.1, 0.1, 0.1)))
    assert res.s == pytest.approx(bd23_oracle(np.array([0.6, 0, 0.1, 0.1, 0.1, 0.1])), abs=1e-6)
    assert_lp_witnesses(res)
    assert abs(res.certificates["prime_boundary"]) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bd23_lp_dominates_sdp(seed):
    desc = Bd23Params(random_simplex(np.random.default_rng(seed), 6))
    lp = robustness_family_lp(desc)
    if lp.flags["separable_input"]:
        return
    assert lp.s >= robustness_ppt_sdp(family_state(desc)).s - 1e-6
    assert_lp_witnesses(lp)
