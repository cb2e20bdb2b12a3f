"""Closed-form robustness of entanglement with explicit witness states.

Every function returns a :class:`RobustnessResult` holding ``s`` and the
two separable states of the pseudomixture
``rho' = (rho + s rho'') / (1 + s)``, together with numerical certificates
(pseudomixture residual, separability and boundary margins of both
witnesses).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize_scalar

from .linalg import DensityMatrix, min_eigenvalue, partial_transpose_matrix, projector
from .separability import (
    BOUNDARY_TOL,
    PPT_EXACT_DIMS,
    bd23_separable,
    bd_separable,
    family_separable,
    icd_separable,
    parameter_interval,
)
from .states import (
    SPIN_FLIP,
    Bd23Params,
    BdParams,
    Horo33Params,
    IcdParams,
    IsotropicParams,
    MultiIsoParams,
    WernerParams,
    WoottersData,
    bd_state,
    concurrence,
    icd_basis,
    icd_state,
    bd23_state,
    horo33_matrix,
    isotropic_matrix,
    multi_iso_floor,
    multi_isotropic_matrix,
    werner_matrix,
    wootters_decompose,
)

BOUNDARY_CHECK_TOL = 1e-8


class RankDeficientError(ValueError):
    """The closed form needs a full-rank two-qubit state."""


@dataclass(frozen=True)
class WitnessPlan:
    """Convex weights over the vertices of the boundary plane holding a witness."""

    weights: tuple[float, ...]
    vertices: tuple[str, ...]
    plane: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.vertices):
            raise ValueError("one weight per vertex")
        if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")


@dataclass(frozen=True, eq=False)
class RobustnessResult:
    """Robustness ``s`` with witnesses ``rho'`` (reached mixture) and ``rho''`` (mixed in).

    ``method`` is one of ``"analytic"``, ``"sdp"``, ``"family-lp"``.
    """

    s: float
    rho_prime: DensityMatrix
    rho_dprime: DensityMatrix
    method: str
    certificates: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    plan: WitnessPlan | None = None


def verify_pseudomixture(rho, rho_prime, rho_dprime, s: float) -> float:
    """Frobenius norm of ``(1 + s) rho' - s rho'' - rho``."""
    m = lambda r: r.matrix if isinstance(r, DensityMatrix) else np.asarray(r)
    a, b, c = m(rho), m(rho_prime), m(rho_dprime)
    if not (a.shape == b.shape == c.shape):
        raise ValueError("operands must have the same shape")
    return float(np.linalg.norm((1 + s) * b - s * c - a))


def _separable_margin(rho: DensityMatrix) -> float:
    """PT margin on 2x2/2x3, where it decides separability; NaN elsewhere."""
    if rho.is_bipartite and rho.dims in PPT_EXACT_DIMS:
        return min_eigenvalue(partial_transpose_matrix(rho.matrix, rho.dims))
    return float("nan")


def witness_certificates(rho, rho_prime, rho_dprime, s, margin_prime=None, margin_dprime=None) -> dict:
    """Pseudomixture residual plus separability and boundary margins of both witnesses.

    A separable state lies on the boundary of the separable set when its
    separability margin vanishes or when it is singular (boundary of the
    state space); the ``*_boundary`` entries are the minimum of the two.
    Family margins can be passed in; otherwise the PT margin is used where
    it is exact.
    """
    out = {"pseudomixture_residual": verify_pseudomixture(rho, rho_prime, rho_dprime, s)}
    for tag, w, given in (("prime", rho_prime, margin_prime), ("dprime", rho_dprime, margin_dprime)):
        sep = _separable_margin(w) if given is None else float(given)
        eig = min_eigenvalue(w.matrix)
        out[f"{tag}_separable_margin"] = sep
        out[f"{tag}_min_eig"] = eig
        out[f"{tag}_boundary"] = min(sep, eig)
        if w.is_bipartite:
            out[f"{tag}_pt_min_eig"] = min_eigenvalue(partial_transpose_matrix(w.matrix, w.dims))
    return out


def witness_flags(cert: dict, tol: float = BOUNDARY_CHECK_TOL) -> dict:
    """Separability and boundary flags derived from :func:`witness_certificates`."""
    flags = {}
    for tag in ("prime", "dprime"):
        sep = cert[f"{tag}_separable_margin"]
        flags[f"{tag}_separable"] = bool(sep >= -tol)
        flags[f"{tag}_on_boundary"] = bool(sep >= -tol and abs(cert[f"{tag}_boundary"]) <= tol)
    return flags


def _separable_result(rho: DensityMatrix, method: str, margin: float) -> RobustnessResult:
    return RobustnessResult(
        s=0.0,
        rho_prime=rho,
        rho_dprime=rho,
        method=method,
        certificates={"pseudomixture_residual": 0.0, "separable_margin": float(margin)},
        flags={"separable_input": True},
    )


def _result(rho, rho_prime, rho_dprime, s, method="analytic", extra=None, flags=None, plan=None, margins=(None, None)):
    cert = witness_certificates(rho, rho_prime, rho_dprime, s, *margins)
    if extra:
        cert.update(extra)
    fl = {"separable_input": False, **witness_flags(cert)}
    if flags:
        fl.update(flags)
    return RobustnessResult(float(s), rho_prime, rho_dprime, method, cert, fl, plan)


# ---------------------------------------------------------------------------
# Bell-diagonal


def bd_triangle(p) -> np.ndarray:
    """Vertices A, B, C (rows) of the triangle of optimal ``p'`` when ``p[0]`` dominates."""
    p1, p2, p3, p4 = p
    h = 0.5
    near = lambda q: h - (1 - 2 * q) / (4 * p1)
    far = lambda qa, qb: (1 - qa - qb) / (2 * p1) - h
    return np.array(
        [
            [h, near(p2), near(p3), far(p2, p3)],
            [h, near(p2), far(p2, p4), near(p4)],
            [h, far(p3, p4), near(p3), near(p4)],
        ]
    )


def robustness_bd(params: BdParams) -> RobustnessResult:
    """Robustness ``s = 2 p_max - 1`` of a Bell-diagonal state.

    ``rho''`` is the barycenter ``(0, 1/3, 1/3, 1/3)`` of the far face
    ``p''_k = 0``; ``rho'`` is then the barycenter of the triangle A, B, C
    on the near face ``p'_k = 1/2``.
    """
    rho = bd_state(params)
    verdict = bd_separable(params)
    if verdict.margin >= -BOUNDARY_TOL:
        return _separable_result(rho, "analytic", verdict.margin)
    p = np.asarray(params.p)
    k = int(np.argmax(p))
    perm = [k] + [i for i in range(4) if i != k]
    q = p[perm]
    s = 2.0 * q[0] - 1.0
    tri = bd_triangle(q)
    dq = np.array([0.0, 1 / 3, 1 / 3, 1 / 3])
    pp = np.empty(4)
    pdd = np.empty(4)
    pp[perm] = (q + s * dq) / (1 + s)
    pdd[perm] = dq
    rho_prime = bd_state(BdParams(pp))
    rho_dprime = bd_state(BdParams(pdd))
    extra = {
        "triangle_sum_residual": float(np.max(np.abs(tri.sum(axis=1) - 1.0))),
        "triangle_barycenter_residual": float(np.max(np.abs(tri.mean(axis=0) - pp[perm]))),
        "mixing_weight": float(np.min(pp / np.where(p > 0, p, np.inf))),
    }
    margins = (bd_separable(BdParams(pp)).margin, bd_separable(BdParams(pdd)).margin)
    plan = WitnessPlan((1 / 3, 1 / 3, 1 / 3), ("A", "B", "C"), f"p{k + 1}=1/2")
    return _result(rho, rho_prime, rho_dprime, s, extra=extra, plan=plan, margins=margins)


# ---------------------------------------------------------------------------
# Wootters basis


def wootters_coordinates(wd: WoottersData, m: np.ndarray) -> np.ndarray:
    """Diagonal coordinates ``q_j = <x~'_j| m |x~'_j>`` of ``m`` in the normalized Wootters basis."""
    dual = SPIN_FLIP @ wd.normalized_basis.conj()
    return np.einsum("aj,ab,bj->j", dual.conj(), m, dual).real


def wootters_witnesses(rho: DensityMatrix, wd: WoottersData, method: str = "analytic", extra=None) -> RobustnessResult:
    """Witness pair from a Wootters decomposition.

    ``s = C min(K_i + K_j) / 2`` over pairs of ``{2, 3, 4}``; ``rho''`` is
    ``(|x'_i><x'_i| + |x'_j><x'_j|) / (K_i + K_j)`` for the minimizing pair
    and ``rho'`` follows from the pseudomixture.
    """
    lam, K, C = wd.lam, wd.K, wd.C
    pairs = list(combinations((1, 2, 3), 2))
    sums = [K[i] + K[j] for i, j in pairs]
    best = int(np.argmin(sums))
    i, j = pairs[best]
    k = ({1, 2, 3} - {i, j}).pop()
    kij = sums[best]
    s = C * kij / 2.0
    xp = wd.normalized_basis
    dprime = (projector(xp[:, i]) + projector(xp[:, j])) / kij
    rho_dprime = DensityMatrix.from_operator(dprime, (2, 2))
    rho_prime = DensityMatrix.from_operator((rho.matrix + s * dprime) / (1 + s), (2, 2))
    lam_p = lam / (1 + s)
    lam_p[[i, j]] = (lam[[i, j]] + s / kij) / (1 + s)
    q_dd = wootters_coordinates(wd, rho_dprime.matrix)
    cert = {
        "concurrence": C,
        "plane_boundary_residual": float(lam_p[0] - lam_p[1:].sum()),
        "lambda_prime_residual": float(np.max(np.abs(wootters_coordinates(wd, rho_prime.matrix) - lam_p))),
        "lambda_dprime_1": float(q_dd[0]),
        "concurrence_prime": concurrence(rho_prime),
        "concurrence_dprime": concurrence(rho_dprime),
    }
    if extra:
        cert.update(extra)
    a = [0.0, 0.0, 0.0]
    a[k - 1] = 1.0
    plan = WitnessPlan(tuple(a), ("sigma2", "sigma3", "sigma4"), f"sigma{k + 1}")
    return _result(rho, rho_prime, rho_dprime, s, method=method, extra=cert, plan=plan)


def robustness_wootters(rho: DensityMatrix) -> RobustnessResult:
    """Robustness of a full-rank two-qubit state from its Wootters decomposition."""
    if rho.dims != (2, 2):
        raise ValueError(f"needs a two-qubit state, got dims {rho.dims}")
    wd = wootters_decompose(rho)
    if wd.C <= BOUNDARY_TOL:
        return _separable_result(rho, "analytic", -wd.C)
    if not wd.full_rank:
        raise RankDeficientError("state is rank deficient; use the SDP path")
    return wootters_witnesses(rho, wd)


# ---------------------------------------------------------------------------
# theta-rotated family


def icd_lambdas(params: IcdParams) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ``lambda_1..lambda_4`` and ``K_1..K_4`` in basis order.

    Within each pair ``K`` is shared: ``K = (p_a + p_b) / sqrt(4 p_a p_b + (p_a - p_b)^2 sin^2 2theta)``.
    """
    p1, p2, p3, p4 = params.p
    S = np.sin(2.0 * params.theta)
    r12 = np.sqrt(4 * p1 * p2 + (p1 - p2) ** 2 * S**2)
    r34 = np.sqrt(4 * p3 * p4 + (p3 - p4) ** 2 * S**2)
    lam = 0.5 * np.array([(p1 - p2) * S + r12, (p2 - p1) * S + r12, (p3 - p4) * S + r34, (p4 - p3) * S + r34])
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.array([(p1 + p2) / r12] * 2 + [(p3 + p4) / r34] * 2)
    return lam, K


def icd_wootters(params: IcdParams) -> WoottersData:
    """Wootters decomposition of a theta-rotated diagonal state in closed form.

    Each pair of basis states spans an invariant plane where ``tau`` is a
    real symmetric 2x2 matrix; its eigenvectors, with a factor ``i`` on the
    negative eigenvalue, give the Wootters vectors. ``lambda`` and ``K``
    come from :func:`icd_lambdas`.
    """
    lam_cf, K_cf = icd_lambdas(params)
    basis = icd_basis(params.theta)
    p = np.asarray(params.p)
    x = np.zeros((4, 4), dtype=complex)
    for a, b in ((0, 1), (2, 3)):
        v = basis[:, [a, b]] * np.sqrt(p[[a, b]])
        tau = (v.T @ SPIN_FLIP @ v).real
        e, o = np.linalg.eigh(0.5 * (tau + tau.T))
        cols = o * np.where(e >= 0, 1.0, 1j)
        vec = v @ cols.conj()
        # assign each vector to the closed-form value its |eigenvalue| matches
        if abs(abs(e[0]) - lam_cf[a]) + abs(abs(e[1]) - lam_cf[b]) > abs(abs(e[0]) - lam_cf[b]) + abs(abs(e[1]) - lam_cf[a]):
            vec = vec[:, ::-1]
        x[:, [a, b]] = vec
    order = np.argsort(-lam_cf, kind="stable")
    lam = lam_cf[order]
    C = max(0.0, float(lam[0] - lam[1:].sum()))
    full = bool(lam[3] >= 1e-10)
    return WoottersData(lam=lam, basis=x[:, order], K=K_cf[order] if full else None, C=C, full_rank=full)


def robustness_icd(params: IcdParams) -> RobustnessResult:
    """Robustness of a theta-rotated diagonal state, ``s = C min(K_i + K_j) / 2``.

    Any violated pair inequality is handled: sorting ``lambda`` puts the
    dominant value first and each ``K`` travels with its ``lambda``.
    """
    rho = icd_state(params)
    verdict = icd_separable(params)
    if verdict.margin >= -BOUNDARY_TOL:
        return _separable_result(rho, "analytic", verdict.margin)
    wd = icd_wootters(params)
    if not wd.full_rank:
        raise RankDeficientError("state is rank deficient; use the SDP path")
    return wootters_witnesses(rho, wd, extra={"binding": float(int(verdict.binding[-1]))})


# ---------------------------------------------------------------------------
# 2 x 3 family


def _bd23_chamber(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Permutation bringing the most violated pair first with ordered pairs.

    Cyclic shifts of the pairs and swaps inside a pair are local unitary
    symmetries of the family.
    """
    pair = p.reshape(3, 2)
    diff = pair[:, 0] - pair[:, 1]
    tot = pair.sum(axis=1)
    viol = [diff[k] ** 2 - tot[(k + 1) % 3] * tot[(k + 2) % 3] for k in range(3)]
    k = int(np.argmax(viol))
    perm = []
    for j in (k, (k + 1) % 3, (k + 2) % 3):
        a, b = 2 * j, 2 * j + 1
        perm += [a, b] if p[a] >= p[b] else [b, a]
    return np.array(perm), np.array(viol)


def bd23_closed_form(p) -> float:
    """Closed-form value for a state in the first-pair chamber (``p1 >= p2`` dominant)."""
    p1, p2, p3, p4, p5, p6 = p
    n = (p1 - p2) ** 2 - (p3 + p4) * (p5 + p6)
    return 3.0 * n / (2.0 * (np.sqrt((2 * p1 - 1) ** 2 + 3.0 * n) - (2 * p2 - 1)))


def bd23_denominator(p, pdd) -> float:
    """Denominator of the first-pair ratio ``s = N / D`` for a mixed-in ``p''``."""
    a, b, c = p[0] - p[1], p[2] + p[3], p[4] + p[5]
    ad, bd, cd = pdd[0] - pdd[1], pdd[2] + pdd[3], pdd[4] + pdd[5]
    return -2 * a * ad + b * cd + c * bd


def bd23_max_denominator(p, grid: int = 2001) -> tuple[float, np.ndarray]:
    """Maximize the first-pair denominator over states on the saturated first inequality.

    The denominator depends on ``p''`` through ``B = p''3 + p''4``,
    ``C = p''5 + p''6`` and ``p''1 - p''2 = sqrt(B C)``; it is homogeneous of
    degree one, so its maximum over states lies on ``p''2 = 0``, i.e. on the
    curve ``B + C + sqrt(B C) = 1``, parameterized by an angle. A grid scan
    is refined with a bounded scalar search.

    Returns the maximum and the maximizing ``p''`` (balanced inside pairs).
    """
    a, b, c = p[0] - p[1], p[2] + p[3], p[4] + p[5]

    def D(phi):
        cs, sn = np.cos(phi), np.sin(phi)
        return (c * cs * cs + b * sn * sn - 2 * a * cs * sn) / (1 + cs * sn)

    phis = np.linspace(0.0, np.pi / 2, grid)
    vals = D(phis)
    i = int(np.argmax(vals))
    lo, hi = phis[max(i - 1, 0)], phis[min(i + 1, grid - 1)]
    best_phi, best = phis[i], vals[i]
    if hi > lo:
        res = minimize_scalar(lambda t: -D(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        if -res.fun > best:
            best_phi, best = res.x, -res.fun
    r2 = 1.0 / (1 + np.cos(best_phi) * np.sin(best_phi))
    B, C = r2 * np.cos(best_phi) ** 2, r2 * np.sin(best_phi) ** 2
    A = np.sqrt(B * C)
    pdd = np.array([A, 0.0, B / 2, B / 2, C / 2, C / 2])
    return float(best), pdd / pdd.sum()


def robustness_bd23(params: Bd23Params) -> RobustnessResult:
    """Closed-form value for the 2 x 3 Bell-like diagonal family.

    ``s`` is the closed form :func:`bd23_closed_form`. The witnesses come
    from maximizing the denominator of ``s = N / D`` over states on the
    saturated first inequality; ``s_denominator_max = N / max D`` is the
    robustness those witnesses certify. When the two values differ the
    pseudomixture residual at ``s`` is nonzero and ``witness_consistent``
    is False.
    """
    rho = bd23_state(params)
    verdict = bd23_separable(params)
    if verdict.margin >= -BOUNDARY_TOL:
        return _separable_result(rho, "analytic", verdict.margin)
    p = np.asarray(params.p)
    perm, viol = _bd23_chamber(p)
    q = p[perm]
    s_cf = float(bd23_closed_form(q))
    n = (q[0] - q[1]) ** 2 - (q[2] + q[3]) * (q[4] + q[5])
    dmax, qdd = bd23_max_denominator(q)
    s_w = n / dmax
    qp = (q + s_w * qdd) / (1 + s_w)
    pp = np.empty(6)
    pdd = np.empty(6)
    pp[perm] = qp
    pdd[perm] = qdd
    rho_prime = bd23_state(Bd23Params(pp))
    rho_dprime = bd23_state(Bd23Params(pdd))
    extra = {
        "closed_form_s": s_cf,
        "s_denominator_max": float(s_w),
        "denominator_max": float(dmax),
        "closed_form_gap": float(s_w - s_cf),
        "witness_pseudomixture_residual": verify_pseudomixture(rho, rho_prime, rho_dprime, s_w),
    }
    flags = {
        "witness_consistent": bool(abs(s_w - s_cf) <= BOUNDARY_CHECK_TOL),
        "multiple_violations": bool(np.sum(viol > BOUNDARY_TOL) > 1),
    }
    margins = (bd23_separable(Bd23Params(pp)).margin, bd23_separable(Bd23Params(pdd)).margin)
    return _result(rho, rho_prime, rho_dprime, s_cf, extra=extra, flags=flags, margins=margins)


# ---------------------------------------------------------------------------
# one-parameter families


def _interval_margin(desc, t: float) -> float:
    iv = parameter_interval(desc)
    lo, hi = iv.separable
    m = []
    if lo > iv.valid[0]:
        m.append(t - lo)
    if hi < iv.valid[1]:
        m.append(hi - t)
    return min(m)


def _one_parameter(desc, build, dims, s, t_prime, t_dprime, extra=None):
    rho = DensityMatrix(build(desc, None), dims)
    verdict = family_separable(desc)
    if verdict.margin >= -BOUNDARY_TOL:
        return _separable_result(rho, "analytic", verdict.margin)
    rho_prime = DensityMatrix(build(desc, t_prime), dims)
    rho_dprime = DensityMatrix(build(desc, t_dprime), dims)
    cert = {"t_prime": float(t_prime), "t_dprime": float(t_dprime)}
    if extra:
        cert.update(extra)
    margins = (_interval_margin(desc, t_prime), _interval_margin(desc, t_dprime))
    return _result(rho, rho_prime, rho_dprime, s, extra=cert, margins=margins)


def robustness_werner(params: WernerParams) -> RobustnessResult:
    """``s = -f``; ``rho'`` at ``f = 0`` and ``rho'' = (I + F) / (d (d + 1))`` at ``f = 1``."""
    d = params.d
    build = lambda p, t: werner_matrix(d, p.f if t is None else t)
    return _one_parameter(params, build, (d, d), -params.f, 0.0, 1.0)


def robustness_isotropic(params: IsotropicParams) -> RobustnessResult:
    """``s = d F - 1``; ``rho'`` at ``F = 1/d`` and ``rho'' = (I - P) / (d^2 - 1)`` at ``F = 0``."""
    d = params.d
    build = lambda p, t: isotropic_matrix(d, p.F if t is None else t)
    return _one_parameter(params, build, (d, d), d * params.F - 1.0, 1.0 / d, 0.0)


def robustness_horo33(params: Horo33Params) -> RobustnessResult:
    """``s = alpha/3 - 1``; ``rho'`` at ``alpha = 3`` and ``rho''`` at ``alpha = 0``.

    The ``alpha = 0`` member is a valid density matrix but lies outside the
    separable interval [2, 3]; its separability margin is reported as is.
    """
    build = lambda p, t: horo33_matrix(p.alpha if t is None else t)
    return _one_parameter(params, build, (3, 3), params.alpha / 3.0 - 1.0, 3.0, 0.0)


def multi_iso_robustness(d: int, n: int, r: float) -> float:
    """``(r - r0)(d^n - 1) / (1 + r0 (d^n - 1))``."""
    D = d**n
    r0 = 1.0 / (1.0 + d ** (n - 1))
    return (r - r0) * (D - 1) / (1 + r0 * (D - 1))


def robustness_multi_iso(params: MultiIsoParams) -> RobustnessResult:
    """Closed form for GHZ-isotropic states; ``rho'' = (I - P) / (d^n - 1)`` at ``r = 1/(1 - d^n)``."""
    d, n = params.d, params.n
    build = lambda p, t: multi_isotropic_matrix(d, n, p.r if t is None else t)
    return _one_parameter(
        params, build, (d,) * n, multi_iso_robustness(d, n, params.r), params.r0, multi_iso_floor(d, n)
    )


ANALYTIC = {
    "bd": robustness_bd,
    "icd": robustness_icd,
    "bd23": robustness_bd23,
    "werner": robustness_werner,
    "isotropic": robustness_isotropic,
    "horo33": robustness_horo33,
    "multiiso": robustness_multi_iso,
}


def robustness_analytic(desc) -> RobustnessResult:
    """Dispatch a family descriptor to its closed form."""
    return ANALYTIC[desc.family](desc)
