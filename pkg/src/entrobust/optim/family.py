"""Robustness restricted to a diagonal family (the family LP oracle).

Both witnesses are taken from the family's own separable set:

* Bell-diagonal, theta-rotated and generic two-qubit states use Wootters
  coordinates ``q`` (``rho = sum q_i |x'_i><x'_i|``, ``sum K_i q_i = 1``),
  where the separable set is the polytope ``0 <= 2 q_j <= sum q``. With
  ``u = s q''`` the problem is the single LP::

      minimize  K . u
      s.t.      u >= 0,  2 u_j <= sum u,  2 (lam_j + u_j) <= sum lam + sum u

* The 2 x 3 family has second-order-cone constraints
  ``|v_a - v_b| <= sqrt(B C)``; they are met by Kelley cutting planes on
  the same homogenized form.
* One-parameter families have an interval as separable set; the optimum
  puts ``rho'`` at the near endpoint and ``rho''`` at the far one.

``method="bisection"`` solves the polytope and interval cases instead as a
sequence of feasibility problems in ``s``.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from ..analytic import RobustnessResult, _result, _separable_result, verify_pseudomixture
from ..linalg import DensityMatrix, projector
from ..separability import BOUNDARY_TOL, bd23_separable, parameter_interval
from ..states import (
    Bd23Params,
    BdParams,
    Horo33Params,
    IcdParams,
    IsotropicParams,
    MultiIsoParams,
    WernerParams,
    bd23_state,
    bell_basis_2x2,
    bd_state,
    family_state,
    horo33_matrix,
    icd_state,
    isotropic_matrix,
    multi_isotropic_matrix,
    werner_matrix,
    wootters_decompose,
)

BISECTION_TOL = 1e-10
CUT_TOL = 1e-9
HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
MAX_CUTS = 500


class LpError(RuntimeError):
    """The linear program failed."""


def _linprog(c, A, b):
    res = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs", options=HIGHS_OPTIONS)
    if res.status != 0:
        raise LpError(res.message)
    return res


def _polytope_rows(n: int) -> np.ndarray:
    """Rows of ``2 v_j - sum v`` for the cone ``2 v_j <= sum v``."""
    return 2.0 * np.eye(n) - np.ones((n, n))


def polytope_lp(lam, K) -> tuple[float, np.ndarray]:
    """Minimal ``s = K.u`` with ``u`` and ``lam + u`` in the cone ``2 v_j <= sum v``.

    Returns ``s`` and ``u = s q''``.
    """
    lam = np.asarray(lam, dtype=float)
    K = np.asarray(K, dtype=float)
    R = _polytope_rows(lam.size)
    A = np.vstack([R, R])
    b = np.concatenate([np.zeros(lam.size), -R @ lam])
    res = _linprog(K, A, b)
    u = np.clip(res.x, 0.0, None)
    return float(K @ u), u


def polytope_bisection(lam, K, tol: float = BISECTION_TOL) -> tuple[float, np.ndarray]:
    """Same optimum as :func:`polytope_lp`, by bisection on ``s``.

    For fixed ``s`` the feasibility problem in ``q''`` is: ``q'' >= 0``,
    ``K.q'' = 1``, ``2 q''_j <= sum q''`` and ``2 (lam_j + s q''_j) <= sum lam + s sum q''``.
    """
    lam = np.asarray(lam, dtype=float)
    K = np.asarray(K, dtype=float)
    n = lam.size
    R = _polytope_rows(n)

    def feasible(s):
        A = np.vstack([R, s * R])
        b = np.concatenate([np.zeros(n), -R @ lam])
        res = linprog(np.zeros(n), A_ub=A, b_ub=b, A_eq=K[None], b_eq=[1.0], bounds=(0, None), method="highs", options=HIGHS_OPTIONS)
        return res.x if res.status == 0 else None

    lo, hi = 0.0, 2.0 * n
    q = feasible(hi)
    if q is None:
        raise LpError("bisection bracket does not contain a feasible point")
    if feasible(0.0) is not None:
        return 0.0, np.zeros(n)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        qm = feasible(mid)
        if qm is None:
            lo = mid
        else:
            hi, q = mid, qm
    return hi, hi * np.clip(q, 0.0, None)


def _solve_polytope(lam, K, method):
    if method == "bisection":
        return polytope_bisection(lam, K)
    if method == "direct":
        return polytope_lp(lam, K)
    raise ValueError(f"unknown method {method!r}")


def _diagonal_result(rho, projectors, lam, K, method, label):
    """Witnesses from a polytope solution in a basis of rank-one operators."""
    if lam[0] - lam[1:].sum() <= BOUNDARY_TOL * max(1.0, K.max()):
        return _separable_result(rho, "family-lp", float(lam[1:].sum() - lam[0]))
    s, u = _solve_polytope(lam, K, method)
    dprime = np.tensordot(u / s, projectors, axes=1)
    rho_dprime = DensityMatrix.from_operator(dprime, rho.dims)
    rho_prime = DensityMatrix.from_operator((rho.matrix + s * dprime) / (1 + s), rho.dims)
    q_p = (lam + u) / (1 + s)
    q_dd = u / s
    margins = (
        float(np.min(q_p.sum() - 2 * q_p)) / 2,
        float(np.min(q_dd.sum() - 2 * q_dd)) / 2,
    )
    extra = {"lp_solution_" + label + str(i + 1): float(v) for i, v in enumerate(q_dd)}
    return _result(rho, rho_prime, rho_dprime, s, method="family-lp", extra=extra, margins=margins)


def robustness_tetrahedron_lp(rho: DensityMatrix, method: str = "direct") -> RobustnessResult:
    """Family LP in the Wootters coordinates of a full-rank two-qubit state."""
    wd = wootters_decompose(rho)
    if wd.C <= BOUNDARY_TOL:
        return _separable_result(rho, "family-lp", -wd.C)
    if not wd.full_rank:
        raise ValueError("state is rank deficient; Wootters coordinates are undefined")
    xp = wd.normalized_basis
    projectors = np.array([projector(xp[:, i]) for i in range(4)])
    return _diagonal_result(rho, projectors, wd.lam, wd.K, method, "q")


def _bd_lp(params: BdParams, method: str) -> RobustnessResult:
    rho = bd_state(params)
    basis = bell_basis_2x2()
    projectors = np.array([projector(basis[:, i]) for i in range(4)])
    p = np.asarray(params.p)
    order = np.argsort(-p, kind="stable")
    res = _diagonal_result(rho, projectors[order], p[order], np.ones(4), method, "p")
    return res


# ---------------------------------------------------------------------------
# 2 x 3 family


def _pair_parts(v):
    pair = np.asarray(v).reshape(3, 2)
    return pair[:, 0] - pair[:, 1], pair.sum(axis=1)


def _soc_violation(v) -> np.ndarray:
    diff, tot = _pair_parts(v)
    return np.array([abs(diff[k]) - np.sqrt(max(tot[(k + 1) % 3], 0) * max(tot[(k + 2) % 3], 0)) for k in range(3)])


def _cut_row(k: int, sign: float, t: float) -> np.ndarray:
    """Row ``g`` of the cut ``g.v <= 0``: ``sign (v_a - v_b) <= (t B + C / t) / 2``."""
    g = np.zeros(6)
    g[2 * k] = sign
    g[2 * k + 1] = -sign
    for j, w in (((k + 1) % 3, -t / 2), ((k + 2) % 3, -1 / (2 * t))):
        g[2 * j] += w
        g[2 * j + 1] += w
    return g


def bd23_cone_lp(p) -> tuple[float, np.ndarray, int]:
    """Minimal ``s = sum u`` with ``u`` and ``p + u`` in the 2 x 3 separable cone.

    Kelley cutting planes: tangent cuts of ``|v_a - v_b| <= sqrt(B C)`` at
    the current point are added until the largest violation is below
    ``CUT_TOL``. Returns ``s``, ``u`` and the number of LP solves.
    """
    p = np.asarray(p, dtype=float)
    cuts = [_cut_row(k, sg, t) for k in range(3) for sg in (1.0, -1.0) for t in (0.25, 0.5, 1.0, 2.0, 4.0)]
    for n_lp in range(1, MAX_CUTS + 1):
        G = np.array(cuts)
        A = np.vstack([G, G])
        b = np.concatenate([np.zeros(len(G)), -G @ p])
        u = np.clip(_linprog(np.ones(6), A, b).x, 0.0, None)
        worst = 0.0
        for v in (u, p + u):
            viol = _soc_violation(v)
            diff, tot = _pair_parts(v)
            for k in np.flatnonzero(viol > CUT_TOL):
                B, C = max(tot[(k + 1) % 3], 1e-300), max(tot[(k + 2) % 3], 1e-300)
                t = float(np.clip(np.sqrt(C / B), 1e-8, 1e8))
                cuts.append(_cut_row(int(k), float(np.sign(diff[k])), t))
            worst = max(worst, float(viol.max()))
        if worst <= CUT_TOL:
            # the balanced state adds a/3 to every pair total and no pair
            # difference; sqrt((B + a)(C + a)) >= sqrt(B C) + a, so a = worst
            # makes both u and p + u exactly feasible
            if worst > 0:
                u = u + worst / 2.0
            return float(u.sum()), u, n_lp
    raise LpError(f"cutting planes did not converge in {MAX_CUTS} LP solves")


def _bd23_lp(params: Bd23Params) -> RobustnessResult:
    rho = bd23_state(params)
    verdict = bd23_separable(params)
    if verdict.margin >= -BOUNDARY_TOL:
        return _separable_result(rho, "family-lp", verdict.margin)
    p = np.asarray(params.p)
    s, u, n_lp = bd23_cone_lp(p)
    pp, pdd = (p + u) / (1 + s), u / s
    pp, pdd = pp / pp.sum(), pdd / pdd.sum()
    rho_prime = bd23_state(Bd23Params(pp))
    rho_dprime = bd23_state(Bd23Params(pdd))
    margins = (bd23_separable(Bd23Params(pp)).margin, bd23_separable(Bd23Params(pdd)).margin)
    return _result(rho, rho_prime, rho_dprime, s, method="family-lp", extra={"lp_solves": float(n_lp)}, margins=margins)


# ---------------------------------------------------------------------------
# one-parameter families


def _member(desc, t: float) -> np.ndarray:
    if isinstance(desc, WernerParams):
        return werner_matrix(desc.d, t)
    if isinstance(desc, IsotropicParams):
        return isotropic_matrix(desc.d, t)
    if isinstance(desc, Horo33Params):
        return horo33_matrix(t)
    if isinstance(desc, MultiIsoParams):
        return multi_isotropic_matrix(desc.d, desc.n, t)
    raise TypeError(type(desc).__name__)


def interval_endpoints(lo: float, hi: float, t: float) -> tuple[float, float, float]:
    """``(s, t', t'')`` for a parameter ``t`` outside the separable interval ``[lo, hi]``."""
    near, far = (hi, lo) if t > hi else (lo, hi)
    return (t - near) / (near - far), near, far


def interval_bisection(lo: float, hi: float, t: float, tol: float = BISECTION_TOL) -> tuple[float, float, float]:
    """Same optimum as :func:`interval_endpoints` by bisection on ``s``.

    For fixed ``s`` the reachable ``t'`` form the interval
    ``[(t + s lo)/(1+s), (t + s hi)/(1+s)]``; feasibility is its overlap
    with ``[lo, hi]``.
    """

    def reach(s):
        return (t + s * lo) / (1 + s), (t + s * hi) / (1 + s)

    def feasible(s):
        a, b = reach(s)
        return a <= hi and b >= lo

    a, b = 0.0, 2.0 * max(1.0, abs(t - lo), abs(t - hi)) / max(hi - lo, 1e-300)
    while not feasible(b):
        b *= 2.0
    while b - a > tol:
        mid = 0.5 * (a + b)
        a, b = (a, mid) if feasible(mid) else (mid, b)
    s = b
    tp = hi if t > hi else lo
    tdd = ((1 + s) * tp - t) / s
    return s, tp, tdd


def _interval_lp(desc, method: str) -> RobustnessResult:
    iv = parameter_interval(desc)
    rho = family_state(desc)
    lo, hi = iv.separable
    t = iv.value
    if lo - BOUNDARY_TOL <= t <= hi + BOUNDARY_TOL:
        return _separable_result(rho, "family-lp", min(t - lo, hi - t))
    if method == "direct":
        s, tp, tdd = interval_endpoints(lo, hi, t)
    elif method == "bisection":
        s, tp, tdd = interval_bisection(lo, hi, t)
    else:
        raise ValueError(f"unknown method {method!r}")
    rho_prime = DensityMatrix(_member(desc, tp), rho.dims)
    rho_dprime = DensityMatrix(_member(desc, tdd), rho.dims)

    def margin(x):
        m = []
        if lo > iv.valid[0]:
            m.append(x - lo)
        if hi < iv.valid[1]:
            m.append(hi - x)
        return min(m)

    extra = {"t_prime": float(tp), "t_dprime": float(tdd)}
    return _result(rho, rho_prime, rho_dprime, s, method="family-lp", extra=extra, margins=(margin(tp), margin(tdd)))


def robustness_family_lp(desc, method: str = "direct") -> RobustnessResult:
    """Robustness with both witnesses restricted to the family's separable set.

    Parameters
    ----------
    desc : family descriptor
        Any of the seven family parameter records.
    method : {"direct", "bisection"}
        Single homogenized LP (or endpoint rule) versus bisection on ``s``.
        The 2 x 3 family always uses cutting planes.
    """
    if isinstance(desc, BdParams):
        return _bd_lp(desc, method)
    if isinstance(desc, IcdParams):
        return robustness_tetrahedron_lp(icd_state(desc), method)
    if isinstance(desc, Bd23Params):
        return _bd23_lp(desc)
    return _interval_lp(desc, method)


__all__ = [
    "LpError",
    "bd23_cone_lp",
    "interval_bisection",
    "interval_endpoints",
    "polytope_bisection",
    "polytope_lp",
    "robustness_family_lp",
    "robustness_tetrahedron_lp",
    "verify_pseudomixture",
]
