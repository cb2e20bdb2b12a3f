"""Seeded cross-validation suites.

Every suite draws its instances up front from ``numpy.random.default_rng(seed)``,
evaluates them (concurrently when ``ENTROBUST_THREADS`` > 1) and assembles a
report ordered by instance index, so the report depends only on
``(suite, samples, seed, tol)``.

A report holds one record per instance, a list of checks
``{"name", "value", "threshold", "pass"}`` and a summary. Informational
checks are reported with ``"pass": null`` and never fail the suite.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .analytic import (
    _bd23_chamber,
    robustness_analytic,
    robustness_bd,
    robustness_wootters,
)
from .io import descriptor_to_json
from .linalg import DensityMatrix
from .optim.family import LpError, robustness_family_lp
from .optim.ppt import optimal_mixing_weight, robustness_ppt_sdp
from .optim.sdp import DEFAULT_TOL, SdpError, SdpProblem, solve_sdp
from .separability import ICD_FORMS, family_separable, icd_separable, is_ppt, select_icd_forms
from .states import (
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
    isotropic_matrix,
    multi_isotropic_matrix,
    random_density_matrix,
    random_simplex,
    wootters_decompose,
)

PSEUDOMIXTURE_TOL = 1e-9
SDP_MATCH_TOL = 1e-6
LP_MATCH_TOL = 1e-8
PARAM_LP_TOL = 1e-9
LAMBDA_TOL = 1e-7
IDENTITY_TOL = 1e-12
WITNESS_TOL = 1e-8
WEAK_DUALITY_TOL = 1e-8
DUAL_FEAS_TOL = 1e-7
BASIS_TOL = 1e-9
CONCURRENCE_TOL = 1e-10
SCALE_TOL = 1e-10
ICD_AGREEMENT_POINTS = 10_000

# frozen reference values of the 2 x 3 closed form
BD23_SPOTS = (
    ((0.6, 0.0, 0.1, 0.1, 0.1, 0.1), 0.24),
    ((0.5, 0.0, 0.125, 0.125, 0.125, 0.125), 9.0 / 56.0),
)

DEFAULT_SAMPLES = {
    "bd": 1000,
    "wootters": 200,
    "icd": 200,
    "bd23": 200,
    "werner": 50,
    "isotropic": 50,
    "horo33": 50,
    "multiiso": 50,
    "offdiag": 200,
    "sdp-certs": 50,
    "wootters-basis": 500,
}


def threads() -> int:
    """Worker count from ``ENTROBUST_THREADS``; 0 or unset means serial."""
    try:
        return max(0, int(os.environ.get("ENTROBUST_THREADS", "0")))
    except ValueError:
        return 0


def _map(fn, items) -> list:
    n = threads()
    if n <= 1:
        return [fn(i, x) for i, x in enumerate(items)]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, range(len(items)), items))


def _guard(fn):
    """Turn solver failures into an ``error`` record instead of aborting the suite."""

    def run(i, x):
        try:
            rec = fn(i, x)
        except (SdpError, LpError) as exc:
            rec = {"error": f"{type(exc).__name__}: {exc}"}
        return {"index": i, **rec}

    return run


def _check(name, value, threshold, ok=None, informational=False) -> dict:
    value = float(value)
    if informational:
        ok = None
    elif ok is None:
        ok = bool(value <= threshold)
    return {"name": name, "value": value, "threshold": float(threshold), "pass": ok}


def _max(records, key, absolute=True) -> float:
    vals = [r[key] for r in records if key in r]
    if not vals:
        return 0.0
    vals = np.abs(vals) if absolute else np.asarray(vals)
    return float(np.max(vals))


def _count(records, key) -> int:
    return sum(1 for r in records if key in r and not r[key])


def _errors(records) -> dict:
    n = sum(1 for r in records if "error" in r)
    return _check("solver_errors", n, 0, ok=n == 0)


def _sdp_checks(records, tol) -> list:
    """Converged PPT solves meet ``gap <= tol`` and ``||F Z|| <= sqrt(tol)``."""
    return [
        _check("sdp_gap", _max(records, "sdp_gap"), tol),
        _check("sdp_slackness", _max(records, "sdp_slackness"), np.sqrt(tol)),
    ]


def _sdp_fields(res) -> dict:
    c = res.certificates
    if "gap" not in c:
        return {}
    return {
        "sdp_gap": c["gap"],
        "sdp_slackness": c["slackness_residual"],
        "sdp_prime_pt_min_eig": c["prime_pt_min_eig"],
    }


def _witness_fields(res, prefix="") -> dict:
    c, f = res.certificates, res.flags
    return {
        prefix + "pseudomixture": c.get("pseudomixture_residual", 0.0),
        prefix + "prime_boundary": c.get("prime_boundary", 0.0),
        prefix + "dprime_boundary": c.get("dprime_boundary", 0.0),
        prefix + "prime_separable": f.get("prime_separable", True),
        prefix + "dprime_separable": f.get("dprime_separable", True),
    }


def _witness_checks(records, prefix="") -> list:
    return [
        _check(prefix + "pseudomixture_residual", _max(records, prefix + "pseudomixture"), PSEUDOMIXTURE_TOL),
        _check(prefix + "prime_boundary_margin", _max(records, prefix + "prime_boundary"), WITNESS_TOL),
        _check(prefix + "dprime_boundary_margin", _max(records, prefix + "dprime_boundary"), WITNESS_TOL),
        _check(prefix + "prime_not_separable", _count(records, prefix + "prime_separable"), 0),
        _check(prefix + "dprime_not_separable", _count(records, prefix + "dprime_separable"), 0),
    ]


def _report(suite, samples, seed, tol, records, checks, deviation) -> dict:
    for r in records:
        r["seed"] = seed
        r["tol"] = tol
    decided = [c for c in checks if c["pass"] is not None]
    n_pass = sum(1 for c in decided if c["pass"])
    return {
        "suite": suite,
        "version": __version__,
        "seed": seed,
        "samples": samples,
        "tol": tol,
        "records": records,
        "checks": checks,
        "summary": {
            "max_deviation": deviation,
            "checks_passed": n_pass,
            "checks_failed": len(decided) - n_pass,
            "instances": len(records),
            "seed": seed,
        },
        "pass": n_pass == len(decided),
    }


def _entangled(rng, sample):
    """Draw descriptors until one is entangled."""
    while True:
        desc = sample(rng)
        if not family_separable(desc).separable:
            return desc


# ---------------------------------------------------------------------------
# suites


def suite_bd(samples, seed, tol):
    """Bell-diagonal closed form against the PPT SDP and the family LP."""
    rng = np.random.default_rng(seed)
    descs = [_entangled(rng, lambda g: BdParams(random_simplex(g, 4))) for _ in range(samples)]

    @_guard
    def run(i, desc):
        a = robustness_bd(desc)
        sdp = robustness_ppt_sdp(bd_state(desc), tol)
        lp = robustness_family_lp(desc)
        lam = optimal_mixing_weight(bd_state(desc), a.rho_prime, tol)
        return {
            "input": descriptor_to_json(desc),
            "s_analytic": a.s,
            "s_sdp": sdp.s,
            "s_lp": lp.s,
            "dev_sdp": a.s - sdp.s,
            "dev_lp": a.s - lp.s,
            "dev_lambda": 1.0 / (1.0 + a.s) - lam,
            "dev_min_ratio": a.certificates["mixing_weight"] - 1.0 / (1.0 + a.s),
            **_witness_fields(a),
            **_sdp_fields(sdp),
        }

    recs = _map(run, descs)
    checks = [
        _errors(recs),
        _check("analytic_vs_sdp", _max(recs, "dev_sdp"), SDP_MATCH_TOL),
        _check("analytic_vs_lp", _max(recs, "dev_lp"), LP_MATCH_TOL),
        _check("mixing_weight_identity", _max(recs, "dev_lambda"), LAMBDA_TOL),
        _check("min_ratio_identity", _max(recs, "dev_min_ratio"), LAMBDA_TOL),
        *_witness_checks(recs),
        *_sdp_checks(recs, tol),
        _check("sdp_prime_pt_boundary", _max(recs, "sdp_prime_pt_min_eig"), SDP_MATCH_TOL),
    ]
    return _report("bd", samples, seed, tol, recs, checks, _max(recs, "dev_sdp"))


def _random_entangled_full_rank(rng) -> DensityMatrix:
    while True:
        rho = random_density_matrix(rng, 4, (2, 2))
        wd = wootters_decompose(rho)
        if wd.full_rank and wd.C > 1e-9:
            return rho


def suite_wootters(samples, seed, tol):
    """Wootters-basis formula against the PPT SDP on random full-rank states.

    Every fourth instance is Bell-diagonal; on that subset the SDP must match
    the formula and the formula must equal the concurrence. Elsewhere the
    formula is checked only as an upper bound; the largest gap is reported.
    """
    rng = np.random.default_rng(seed)
    items = []
    for i in range(samples):
        if i % 4 == 3:
            items.append(("bd", _entangled(rng, lambda g: BdParams(random_simplex(g, 4)))))
        else:
            items.append(("generic", _random_entangled_full_rank(rng)))

    @_guard
    def run(i, item):
        kind, x = item
        rho = bd_state(x) if kind == "bd" else x
        a = robustness_wootters(rho)
        sdp = robustness_ppt_sdp(rho, tol)
        rec = {
            "kind": kind,
            "s_analytic": a.s,
            "s_sdp": sdp.s,
            "gap": a.s - sdp.s,
            "concurrence_prime": a.certificates["concurrence_prime"],
            "lambda_dprime_1": a.certificates["lambda_dprime_1"],
            **_witness_fields(a),
            **_sdp_fields(sdp),
        }
        if kind == "bd":
            rec["input"] = descriptor_to_json(x)
            rec["bd_dev_sdp"] = a.s - sdp.s
            rec["bd_dev_concurrence"] = a.s - a.certificates["concurrence"]
            rec["bd_dev_closed_form"] = a.s - robustness_bd(x).s
        else:
            rec["input"] = {"re": rho.matrix.real, "im": rho.matrix.imag, "dims": list(rho.dims)}
        return rec

    recs = _map(run, items)
    above = [r["s_sdp"] - r["s_analytic"] for r in recs if "s_sdp" in r]
    checks = [
        _errors(recs),
        _check("sdp_above_analytic", max(above, default=0.0), SDP_MATCH_TOL),
        _check("bd_subset_analytic_vs_sdp", _max(recs, "bd_dev_sdp"), SDP_MATCH_TOL),
        _check("bd_subset_equals_concurrence", _max(recs, "bd_dev_concurrence"), SCALE_TOL),
        _check("bd_subset_equals_closed_form", _max(recs, "bd_dev_closed_form"), SCALE_TOL),
        _check("witness_concurrence_prime", _max(recs, "concurrence_prime"), WITNESS_TOL),
        _check("witness_lambda_dprime_1", _max(recs, "lambda_dprime_1"), WITNESS_TOL),
        *_witness_checks(recs),
        *_sdp_checks(recs, tol),
        _check("max_gap_analytic_minus_sdp", _max(recs, "gap", absolute=False), 0.0, informational=True),
    ]
    return _report("wootters", samples, seed, tol, recs, checks, _max(recs, "gap", absolute=False))


def suite_icd(samples, seed, tol):
    """Theta-rotated family on a theta grid, plus the inequality-form check against PPT."""
    rng = np.random.default_rng(seed)
    thetas = [k * np.pi / 12 for k in range(1, 6)]
    descs = [_entangled(rng, lambda g, t=t: IcdParams(t, random_simplex(g, 4))) for t in thetas for _ in range(samples)]

    @_guard
    def run(i, desc):
        a = robustness_analytic(desc)
        lp = robustness_family_lp(desc)
        sdp = robustness_ppt_sdp(icd_state(desc), tol)
        return {
            "input": descriptor_to_json(desc),
            "s_analytic": a.s,
            "s_lp": lp.s,
            "s_sdp": sdp.s,
            "dev_lp": a.s - lp.s,
            "sdp_above": sdp.s - a.s,
            "gap": a.s - sdp.s,
            **_witness_fields(a),
            **_sdp_fields(sdp),
        }

    recs = _map(run, descs)

    agree_rng = np.random.default_rng([seed, 1])
    mismatches = 0
    for _ in range(ICD_AGREEMENT_POINTS):
        desc = IcdParams(agree_rng.uniform(1e-3, np.pi / 2 - 1e-3), random_simplex(agree_rng, 4))
        mismatches += icd_separable(desc).separable != is_ppt(icd_state(desc)).separable
    selected = select_icd_forms(seed=seed)["forms"]

    checks = [
        _errors(recs),
        _check("analytic_vs_lp", _max(recs, "dev_lp"), LP_MATCH_TOL),
        _check("sdp_above_analytic", _max(recs, "sdp_above", absolute=False), SDP_MATCH_TOL),
        _check("form_selection_matches_default", 0 if selected == ICD_FORMS else 1, 0),
        _check("separable_vs_ppt_mismatches", mismatches, 0),
        *_witness_checks(recs),
        *_sdp_checks(recs, tol),
        _check("max_gap_analytic_minus_sdp", _max(recs, "gap", absolute=False), 0.0, informational=True),
    ]
    return _report("icd", samples, seed, tol, recs, checks, _max(recs, "dev_lp"))


def suite_bd23(samples, seed, tol):
    """2 x 3 closed form against the family LP, the PPT SDP and the denominator maximization."""
    rng = np.random.default_rng(seed)
    descs = []
    for _ in range(samples):
        p = np.asarray(_entangled(rng, lambda g: Bd23Params(random_simplex(g, 6))).p)
        perm, _ = _bd23_chamber(p)
        descs.append(Bd23Params(p[perm]))

    @_guard
    def run(i, desc):
        a = robustness_analytic(desc)
        lp = robustness_family_lp(desc)
        rho = family_state(desc)
        sdp = robustness_ppt_sdp(rho, tol)
        lam = optimal_mixing_weight(rho, a.rho_prime, tol)
        return {
            "input": descriptor_to_json(desc),
            "s_analytic": a.s,
            "s_lp": lp.s,
            "s_sdp": sdp.s,
            "s_denominator_max": a.certificates["s_denominator_max"],
            "dev_lp": a.s - lp.s,
            "dev_sdp": a.s - sdp.s,
            "dev_denominator": a.certificates["closed_form_gap"],
            "dev_lambda": 1.0 / lam - 1.0 - a.s,
            **_witness_fields(a),
            **_sdp_fields(sdp),
        }

    recs = _map(run, descs)
    spot_dev = max(abs(robustness_analytic(Bd23Params(p)).s - v) for p, v in BD23_SPOTS)
    checks = [
        _errors(recs),
        _check("analytic_vs_lp", _max(recs, "dev_lp"), LP_MATCH_TOL),
        _check("analytic_vs_sdp", _max(recs, "dev_sdp"), SDP_MATCH_TOL),
        _check("denominator_max_vs_closed_form", _max(recs, "dev_denominator"), LP_MATCH_TOL),
        _check("spot_values", spot_dev, LP_MATCH_TOL),
        _check("mixing_weight_identity", _max(recs, "dev_lambda"), LAMBDA_TOL),
        *_witness_checks(recs),
        *_sdp_checks(recs, tol),
    ]
    return _report("bd23", samples, seed, tol, recs, checks, _max(recs, "dev_sdp"))


# one-parameter families: (descriptor, reference formula) pairs on grids


def _werner_grid(n):
    return [(WernerParams(d, f), -f) for d in (2, 3, 4) for f in np.linspace(-1.0, 0.0, n, endpoint=False)[::-1]]


def _isotropic_grid(n):
    return [(IsotropicParams(d, F), d * F - 1.0) for d in (2, 3, 4) for F in np.linspace(1.0, 1.0 / d, n, endpoint=False)[::-1]]


def _horo33_grid(n):
    return [(Horo33Params(a), a / 3.0 - 1.0) for a in np.linspace(5.0, 3.0, n, endpoint=False)[::-1]]


def _multiiso_grid(n):
    out = []
    for d, m in ((2, 2), (2, 3), (3, 2)):
        D = d**m
        r0 = 1.0 / (1.0 + d ** (m - 1))
        for r in np.linspace(1.0, r0, n, endpoint=False)[::-1]:
            out.append((MultiIsoParams(d, m, r), (r - r0) * (D - 1) / (1 + r0 * (D - 1))))
    return out


def _group_key(desc):
    return tuple(getattr(desc, k) for k in ("d", "n") if hasattr(desc, k))


def _one_parameter_suite(name, grid, samples, seed, tol, extra_checks=()):
    items = grid(samples)

    @_guard
    def run(i, item):
        desc, ref = item
        a = robustness_analytic(desc)
        lp = robustness_family_lp(desc)
        return {
            "input": descriptor_to_json(desc),
            "s_reference": ref,
            "s_analytic": a.s,
            "s_lp": lp.s,
            "dev_lp": lp.s - ref,
            "dev_analytic": a.s - ref,
            **_witness_fields(a),
            **_witness_fields(lp, "lp_"),
        }

    recs = _map(run, items)
    # s must not decrease as the state moves away from the separable interval
    drops = 0.0
    groups: dict = {}
    for (desc, _), r in zip(items, recs):
        groups.setdefault(_group_key(desc), []).append(r)
    for rs in groups.values():
        for key in ("s_analytic", "s_lp"):
            s = np.array([r.get(key, np.nan) for r in rs])
            drops = max(drops, float(np.nanmax(np.concatenate(([0.0], -np.diff(s))))))
    checks = [
        _errors(recs),
        _check("lp_vs_formula", _max(recs, "dev_lp"), PARAM_LP_TOL),
        _check("analytic_vs_formula", _max(recs, "dev_analytic"), PARAM_LP_TOL),
        _check("monotonicity_drop", drops, 0.0),
        *_witness_checks(recs),
        *_witness_checks(recs, "lp_"),
        *extra_checks,
    ]
    return _report(name, samples, seed, tol, recs, checks, _max(recs, "dev_lp"))


def suite_werner(samples, seed, tol):
    """Werner states, d in {2, 3, 4}, on a grid of ``samples`` entangled values of f."""
    return _one_parameter_suite("werner", _werner_grid, samples, seed, tol)


def suite_isotropic(samples, seed, tol):
    """Isotropic states, d in {2, 3, 4}, on a grid of ``samples`` entangled fidelities."""
    return _one_parameter_suite("isotropic", _isotropic_grid, samples, seed, tol)


def suite_horo33(samples, seed, tol):
    """3 (x) 3 family on a grid of ``samples`` values of alpha in (3, 5]."""
    return _one_parameter_suite("horo33", _horo33_grid, samples, seed, tol)


def suite_multiiso(samples, seed, tol):
    """GHZ-isotropic states plus the identity with two-qubit isotropic states."""
    dev_m = dev_s = 0.0
    for r in np.linspace(0.0, 1.0, samples):
        F = (1.0 + 3.0 * r) / 4.0
        dev_m = max(dev_m, float(np.max(np.abs(multi_isotropic_matrix(2, 2, r) - isotropic_matrix(2, F)))))
        a = robustness_analytic(MultiIsoParams(2, 2, r)).s
        b = robustness_analytic(IsotropicParams(2, F)).s
        dev_s = max(dev_s, abs(a - b))
    extra = (
        _check("two_qubit_isotropic_matrix_identity", dev_m, IDENTITY_TOL),
        _check("two_qubit_isotropic_s_identity", dev_s, IDENTITY_TOL),
    )
    return _one_parameter_suite("multiiso", _multiiso_grid, samples, seed, tol, extra)


def suite_offdiag(samples, seed, tol):
    """PPT SDP (all matrices) against the diagonal-restricted family LP.

    ``samples`` diagonal entangled states on 2 x 2, alternating Bell-diagonal
    and theta-rotated, and ``samples // 2`` on 2 x 3.
    """
    rng = np.random.default_rng(seed)
    descs = []
    for i in range(samples):
        if i % 2 == 0:
            descs.append(_entangled(rng, lambda g: BdParams(random_simplex(g, 4))))
        else:
            descs.append(_entangled(rng, lambda g: IcdParams(g.uniform(0.05, np.pi / 2 - 0.05), random_simplex(g, 4))))
    descs += [_entangled(rng, lambda g: Bd23Params(random_simplex(g, 6))) for _ in range(samples // 2)]

    @_guard
    def run(i, desc):
        lp = robustness_family_lp(desc)
        sdp = robustness_ppt_sdp(family_state(desc), tol)
        return {
            "input": descriptor_to_json(desc),
            "s_lp": lp.s,
            "s_sdp": sdp.s,
            f"dev_{desc.family}": lp.s - sdp.s,
            **_sdp_fields(sdp),
        }

    recs = _map(run, descs)
    checks = [
        _errors(recs),
        _check("bd_lp_vs_sdp", _max(recs, "dev_bd"), SDP_MATCH_TOL),
        _check("icd_lp_vs_sdp", _max(recs, "dev_icd"), SDP_MATCH_TOL),
        _check("bd23_lp_vs_sdp", _max(recs, "dev_bd23"), SDP_MATCH_TOL),
        *_sdp_checks(recs, tol),
    ]
    dev = max(_max(recs, k) for k in ("dev_bd", "dev_icd", "dev_bd23"))
    return _report("offdiag", samples, seed, tol, recs, checks, dev)


def _random_hermitian(rng, n) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def _random_pd(rng, n) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g @ g.conj().T / n + 0.1 * np.eye(n)


def random_feasible_sdp(rng) -> tuple[SdpProblem, np.ndarray, np.ndarray]:
    """Random problem with a known strictly feasible primal-dual pair ``(x0, Z0)``.

    The LMI has a block diagonal of one or two blocks.
    """
    sizes = [int(rng.integers(2, 7)) for _ in range(int(rng.integers(1, 3)))]
    n = sum(sizes)
    m = int(rng.integers(1, 9))
    Fi = np.zeros((m, n, n), dtype=complex)
    S0 = np.zeros((n, n), dtype=complex)
    Z0 = np.zeros((n, n), dtype=complex)
    at = 0
    for k in sizes:
        sl = slice(at, at + k)
        for i in range(m):
            Fi[i, sl, sl] = _random_hermitian(rng, k)
        S0[sl, sl] = _random_pd(rng, k)
        Z0[sl, sl] = _random_pd(rng, k)
        at += k
    x0 = rng.standard_normal(m)
    F0 = S0 - np.tensordot(x0, Fi, axes=1)
    c = np.einsum("iab,ba->i", Fi, Z0).real
    return SdpProblem(c=c, F0=F0, Fi=Fi), x0, Z0


def suite_sdp_certs(samples, seed, tol):
    """Solver certificates on random strictly feasible problems.

    Each problem is solved from its known feasible pair, where every iterate
    must obey weak duality, and again from the default infeasible start.
    """
    rng = np.random.default_rng(seed)
    items = [random_feasible_sdp(rng) for _ in range(samples)]

    @_guard
    def run(i, item):
        problem, x0, Z0 = item
        feas = solve_sdp(problem, tol, x0=x0, Z0=Z0)
        cold = solve_sdp(problem, tol)
        rec = {"order": problem.n, "variables": problem.m, "objective": feas.p_star, "objective_cold": cold.p_star}
        rec["objective_dev"] = feas.p_star - cold.p_star
        rec["min_iterate_gap"] = min(h["gap"] for h in feas.history)
        for tag, sol in (("", feas), ("cold_", cold)):
            rec[tag + "gap"] = sol.gap
            rec[tag + "slackness"] = sol.slackness_residual
            rec[tag + "dual_residual"] = sol.dual_residual
            rec[tag + "primal_neg_eig"] = max(0.0, -sol.primal_min_eig)
            rec[tag + "dual_neg_eig"] = max(0.0, -sol.dual_min_eig)
            rec[tag + "iterations"] = sol.iterations
        return rec

    recs = _map(run, items)
    min_gap = min((r["min_iterate_gap"] for r in recs if "min_iterate_gap" in r), default=0.0)
    checks = [_errors(recs)]
    for tag in ("", "cold_"):
        checks += [
            _check(tag + "gap", _max(recs, tag + "gap"), tol),
            _check(tag + "slackness", _max(recs, tag + "slackness"), np.sqrt(tol)),
            _check(tag + "dual_feasibility", _max(recs, tag + "dual_residual"), DUAL_FEAS_TOL),
            _check(tag + "primal_psd", _max(recs, tag + "primal_neg_eig"), WEAK_DUALITY_TOL),
            _check(tag + "dual_psd", _max(recs, tag + "dual_neg_eig"), WEAK_DUALITY_TOL),
        ]
    checks += [
        _check("iterate_weak_duality", -min_gap, WEAK_DUALITY_TOL),
        _check("warm_vs_cold_objective", _max(recs, "objective_dev"), SDP_MATCH_TOL),
    ]
    return _report("sdp-certs", samples, seed, tol, recs, checks, _max(recs, "gap"))


def suite_wootters_basis(samples, seed, tol):
    """Wootters decomposition identities on random rank-4 two-qubit states."""
    rng = np.random.default_rng(seed)
    rhos = [random_density_matrix(rng, 4, (2, 2)) for _ in range(samples)]

    @_guard
    def run(i, rho):
        wd = wootters_decompose(rho)
        x = wd.basis
        overlap = x.conj().T @ (SPIN_FLIP @ x.conj())
        return {
            "lambda": wd.lam,
            "orthogonality": float(np.max(np.abs(overlap - np.diag(wd.lam)))),
            "reconstruction": float(np.max(np.abs(x @ x.conj().T - rho.matrix))),
            "concurrence_dev": wd.C - concurrence(rho),
        }

    recs = _map(run, rhos)
    checks = [
        _errors(recs),
        _check("tilde_orthogonality", _max(recs, "orthogonality"), BASIS_TOL),
        _check("reconstruction", _max(recs, "reconstruction"), BASIS_TOL),
        _check("concurrence_vs_eigenvalues", _max(recs, "concurrence_dev"), CONCURRENCE_TOL),
    ]
    return _report("wootters-basis", samples, seed, tol, recs, checks, _max(recs, "orthogonality"))


SUITES = {
    "bd": suite_bd,
    "wootters": suite_wootters,
    "icd": suite_icd,
    "bd23": suite_bd23,
    "werner": suite_werner,
    "isotropic": suite_isotropic,
    "horo33": suite_horo33,
    "multiiso": suite_multiiso,
    "offdiag": suite_offdiag,
    "sdp-certs": suite_sdp_certs,
    "wootters-basis": suite_wootters_basis,
}


def run_suite(name: str, samples: int | None = None, seed: int = 0, tol: float = DEFAULT_TOL) -> dict:
    """Run a named suite; ``samples`` defaults to the suite's standard size."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    samples = DEFAULT_SAMPLES[name] if samples is None else int(samples)
    if samples < 1:
        raise ValueError("samples must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return SUITES[name](samples, int(seed), float(tol))
