"""Separability tests: the generic PPT test and per-family criteria.

Every test returns a :class:`SeparabilityVerdict` whose ``margin`` is the
slack of the binding inequality: positive inside the separable set, zero on
its boundary, negative for entangled states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DensityMatrix, min_eigenvalue, partial_transpose
from .states import (
    Bd23Params,
    BdParams,
    FamilyDescriptor,
    Horo33Params,
    IcdParams,
    IsotropicParams,
    MultiIsoParams,
    WernerParams,
    icd_state,
    multi_iso_threshold,
    random_simplex,
)

BOUNDARY_TOL = 1e-10

# dimension pairs on which PPT is equivalent to separability
PPT_EXACT_DIMS = {(2, 2), (2, 3), (3, 2)}


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Outcome of a separability test.

    Attributes
    ----------
    separable : bool
        ``margin >= -1e-10``.
    margin : float
        Slack of the binding inequality.
    binding : str
        Name of the least-slack inequality.
    ppt_exact : bool
        True when the verdict is exact separability; False when it is only
        a necessary condition (PPT beyond 2x2 and 2x3).
    margins : dict
        Slack of every inequality that entered the verdict.
    label : str or None
        Family-specific class, e.g. ``"bound-entangled"``.
    """

    separable: bool
    margin: float
    binding: str
    ppt_exact: bool = True
    margins: dict = field(default_factory=dict)
    label: str | None = None

    @property
    def boundary(self) -> bool:
        return abs(self.margin) <= BOUNDARY_TOL


def _verdict(margins: dict, ppt_exact: bool = True, label: str | None = None) -> SeparabilityVerdict:
    binding = min(margins, key=margins.get)
    margin = float(margins[binding])
    return SeparabilityVerdict(
        separable=margin >= -BOUNDARY_TOL,
        margin=margin,
        binding=binding,
        ppt_exact=ppt_exact,
        margins={k: float(v) for k, v in margins.items()},
        label=label,
    )


def is_ppt(rho: DensityMatrix) -> SeparabilityVerdict:
    """PPT test; the margin is the smallest eigenvalue of the partial transpose."""
    if not rho.is_bipartite:
        raise ValueError(f"PPT test needs a bipartite state, got dims {rho.dims}")
    margin = min_eigenvalue(partial_transpose(rho, 1))
    return _verdict({"pt_min_eig": margin}, ppt_exact=rho.dims in PPT_EXACT_DIMS)


def bd_separable(params: BdParams) -> SeparabilityVerdict:
    """Octahedron test for Bell-diagonal states.

    The four facets ``1 + s.t >= 0`` facing the Bell vertices reduce to
    ``p_k <= 1/2``; their slack ``1/2 - p_k`` equals the partial-transpose
    eigenvalue, so the margin is ``1/2 - max p``.
    """
    margins = {f"p{k + 1}<=1/2": 0.5 - pk for k, pk in enumerate(params.p)}
    return _verdict(margins)


# ---------------------------------------------------------------------------
# theta-rotated family


def _icd_rhs(pa: float, pb: float, s2: float, form: str) -> float:
    """Right-hand side ``sqrt(4 pa pb g + (pa - pb)^2)`` with ``g = 1/s2`` or ``s2``."""
    g = 1.0 / s2 if form == "divide" else s2
    return float(np.sqrt(4.0 * pa * pb * g + (pa - pb) ** 2))


# ``divide`` is what the PPT oracle selects for all four inequalities;
# see :func:`select_icd_forms`.
ICD_FORMS = {"ppt1": "divide", "ppt2": "divide", "ppt3": "divide", "ppt4": "divide"}


def icd_inequality_margins(params: IcdParams, forms: dict | None = None) -> dict:
    """Slack of the four pair inequalities, RHS - LHS."""
    forms = ICD_FORMS if forms is None else forms
    p1, p2, p3, p4 = params.p
    s2 = np.sin(2.0 * params.theta) ** 2
    return {
        "ppt1": _icd_rhs(p3, p4, s2, forms["ppt1"]) - (p1 - p2),
        "ppt2": _icd_rhs(p3, p4, s2, forms["ppt2"]) - (p2 - p1),
        "ppt3": _icd_rhs(p1, p2, s2, forms["ppt3"]) - (p3 - p4),
        "ppt4": _icd_rhs(p1, p2, s2, forms["ppt4"]) - (p4 - p3),
    }


def icd_separable(params: IcdParams, forms: dict | None = None) -> SeparabilityVerdict:
    """Closed-form separability test for the theta-rotated family."""
    return _verdict(icd_inequality_margins(params, forms))


def select_icd_forms(n_points: int = 20000, seed: int = 0) -> dict:
    """Choose, per inequality, the ``divide``/``multiply`` form matching PPT.

    Samples ``theta`` uniformly in ``(0, pi/2)`` and ``p`` uniformly on the
    simplex. An inequality's form is judged only on points where that
    inequality alone decides the verdict under each candidate, so the other
    three cannot mask a wrong form.

    Returns
    -------
    dict
        ``{"forms": {name: form}, "agreement": {name: {form: fraction}}}``.
    """
    rng = np.random.default_rng(seed)
    names = ("ppt1", "ppt2", "ppt3", "ppt4")
    hits = {n: {"divide": 0, "multiply": 0} for n in names}
    seen = {n: 0 for n in names}
    for _ in range(n_points):
        params = IcdParams(rng.uniform(1e-3, np.pi / 2 - 1e-3), random_simplex(rng, 4))
        ppt = is_ppt(icd_state(params)).separable
        div = icd_inequality_margins(params, dict.fromkeys(names, "divide"))
        mul = icd_inequality_margins(params, dict.fromkeys(names, "multiply"))
        for n in names:
            others_ok = all(min(div[o], mul[o]) > 0 for o in names if o != n)
            if not others_ok:
                continue
            seen[n] += 1
            hits[n]["divide"] += (div[n] >= 0) == ppt
            hits[n]["multiply"] += (mul[n] >= 0) == ppt
    agreement = {n: {f: hits[n][f] / max(seen[n], 1) for f in hits[n]} for n in names}
    forms = {n: max(agreement[n], key=agreement[n].get) for n in names}
    return {"forms": forms, "agreement": agreement}


# ---------------------------------------------------------------------------
# 2 x 3 family


def bd23_inequality_margins(params: Bd23Params) -> dict:
    """Slack ``(p_c + p_d)(p_e + p_f) - (p_a - p_b)^2`` for each of the three pairs."""
    p = np.asarray(params.p)
    pair = p.reshape(3, 2)
    diff = pair[:, 0] - pair[:, 1]
    tot = pair.sum(axis=1)
    return {f"S{k + 1}": float(tot[(k + 1) % 3] * tot[(k + 2) % 3] - diff[k] ** 2) for k in range(3)}


def bd23_separable(params: Bd23Params) -> SeparabilityVerdict:
    """Separability of the 2 (x) 3 Bell-like diagonal family."""
    return _verdict(bd23_inequality_margins(params))


# ---------------------------------------------------------------------------
# one-parameter families


@dataclass(frozen=True)
class ParameterInterval:
    """Valid and separable ranges of a one-parameter family."""

    name: str
    value: float
    valid: tuple[float, float]
    separable: tuple[float, float]


def parameter_interval(desc: FamilyDescriptor) -> ParameterInterval:
    """Parameter, valid range and separable interval of a one-parameter family.

    The valid range is where the family matrix is a density matrix, which can
    be wider than the range accepted by the parameter record.
    """
    if isinstance(desc, WernerParams):
        return ParameterInterval("f", desc.f, (-1.0, 1.0), (0.0, 1.0))
    if isinstance(desc, IsotropicParams):
        return ParameterInterval("F", desc.F, (0.0, 1.0), (0.0, 1.0 / desc.d))
    if isinstance(desc, Horo33Params):
        return ParameterInterval("alpha", desc.alpha, (0.0, 5.0), (2.0, 3.0))
    if isinstance(desc, MultiIsoParams):
        D = desc.d**desc.n
        return ParameterInterval("r", desc.r, (1.0 / (1.0 - D), 1.0), (1.0 / (1.0 - D), multi_iso_threshold(desc.d, desc.n)))
    raise TypeError(f"{type(desc).__name__} is not a one-parameter family")


def horo33_label(alpha: float) -> str:
    """Class of the 3 (x) 3 family member; mirrored through alpha -> 5 - alpha below 2."""
    a = alpha if alpha >= 2.5 else 5.0 - alpha
    if a <= 3.0 + BOUNDARY_TOL:
        return "separable"
    if a <= 4.0 + BOUNDARY_TOL:
        return "bound-entangled"
    return "free-entangled"


def family_separable(desc: FamilyDescriptor) -> SeparabilityVerdict:
    """Authoritative separability verdict for any family descriptor."""
    if isinstance(desc, BdParams):
        return bd_separable(desc)
    if isinstance(desc, IcdParams):
        return icd_separable(desc)
    if isinstance(desc, Bd23Params):
        return bd23_separable(desc)
    iv = parameter_interval(desc)
    lo, hi = iv.separable
    margins = {}
    if lo > iv.valid[0]:
        margins[f"{iv.name}>={lo:g}"] = iv.value - lo
    if hi < iv.valid[1]:
        margins[f"{iv.name}<={hi:g}"] = hi - iv.value
    label = horo33_label(desc.alpha) if isinstance(desc, Horo33Params) else None
    return _verdict(margins, label=label)
