"""State families and the Wootters decomposition of two-qubit states.

Each family has a frozen parameter record (``BdParams``, ``IcdParams``, ...)
whose constructor validates the parameter range, and a constructor returning
a :class:`~entrobust.linalg.DensityMatrix`. Parameter records double as
family descriptors: ``params.family`` is the family tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Union

import numpy as np

from .linalg import (
    PAULIS,
    SIGMA_Y,
    DensityMatrix,
    eig_hermitian,
    flip_operator,
    kron,
    maximally_entangled,
    projector,
)

PROB_TOL = 1e-12
RANK_TOL = 1e-10

# sigma_y (x) sigma_y, the spin-flip kernel: rho~ = Y rho* Y
SPIN_FLIP = kron(SIGMA_Y, SIGMA_Y)


def _probabilities(p, n: int) -> tuple[float, ...]:
    p = np.asarray(p, dtype=float).ravel()
    if p.size != n:
        raise ValueError(f"expected {n} probabilities, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be finite")
    if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
        raise ValueError("probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return tuple(float(x) for x in np.clip(p, 0.0, 1.0))


def _dimension(d, name: str = "d", minimum: int = 2) -> int:
    if int(d) != d or d < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {d!r}")
    return int(d)


def _in_range(x, lo: float, hi: float, name: str) -> float:
    x = float(x)
    if not np.isfinite(x) or x < lo - PROB_TOL or x > hi + PROB_TOL:
        raise ValueError(f"{name} = {x!r} outside [{lo}, {hi}]")
    return x


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class BdParams:
    """Bell-diagonal two-qubit state, weights on (phi+, phi-, psi+, psi-)."""

    family: ClassVar[str] = "bd"
    p: tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "p", _probabilities(self.p, 4))

    @property
    def t(self) -> np.ndarray:
        """Correlation coordinates ``t_i`` with ``rho = (I + sum t_i s_i (x) s_i) / 4``."""
        return bd_t(self.p)


@dataclass(frozen=True)
class IcdParams:
    """State diagonal in the theta-rotated Bell-like basis."""

    family: ClassVar[str] = "icd"
    theta: float
    p: tuple[float, float, float, float]

    def __post_init__(self):
        theta = float(self.theta)
        if not (0.0 < theta < np.pi / 2):
            raise ValueError(f"theta = {theta!r} outside (0, pi/2)")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "p", _probabilities(self.p, 4))


@dataclass(frozen=True)
class Bd23Params:
    """Qubit-qutrit state diagonal in the six Bell-like states of 2 (x) 3."""

    family: ClassVar[str] = "bd23"
    p: tuple[float, float, float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "p", _probabilities(self.p, 6))


@dataclass(frozen=True)
class WernerParams:
    """U (x) U invariant state with ``f = Tr(rho F)`` in [-1, 1]."""

    family: ClassVar[str] = "werner"
    d: int
    f: float

    def __post_init__(self):
        object.__setattr__(self, "d", _dimension(self.d))
        object.__setattr__(self, "f", _in_range(self.f, -1.0, 1.0, "f"))


@dataclass(frozen=True)
class IsotropicParams:
    """U (x) U* invariant state with fidelity ``F`` to the maximally entangled state."""

    family: ClassVar[str] = "isotropic"
    d: int
    F: float

    def __post_init__(self):
        object.__setattr__(self, "d", _dimension(self.d))
        object.__setattr__(self, "F", _in_range(self.F, 0.0, 1.0, "F"))


@dataclass(frozen=True)
class Horo33Params:
    """One-parameter 3 (x) 3 family, alpha in [2, 5]."""

    family: ClassVar[str] = "horo33"
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _in_range(self.alpha, 2.0, 5.0, "alpha"))


@dataclass(frozen=True)
class MultiIsoParams:
    """Mixture of white noise and the n-qudit GHZ state with weight ``r``."""

    family: ClassVar[str] = "multiiso"
    d: int
    n: int
    r: float

    def __post_init__(self):
        object.__setattr__(self, "d", _dimension(self.d))
        object.__setattr__(self, "n", _dimension(self.n, "n"))
        object.__setattr__(self, "r", _in_range(self.r, 0.0, 1.0, "r"))

    @property
    def r0(self) -> float:
        return multi_iso_threshold(self.d, self.n)


FamilyDescriptor = Union[
    BdParams, IcdParams, Bd23Params, WernerParams, IsotropicParams, Horo33Params, MultiIsoParams
]

FAMILIES: dict[str, type] = {
    cls.family: cls
    for cls in (BdParams, IcdParams, Bd23Params, WernerParams, IsotropicParams, Horo33Params, MultiIsoParams)
}


def descriptor(family: str, params: dict) -> FamilyDescriptor:
    """Build a family descriptor from a tag and a parameter mapping."""
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(FAMILIES)}") from None
    if not isinstance(params, dict):
        raise ValueError("params must be a JSON object")
    try:
        return cls(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {family}: {exc}") from None


# ---------------------------------------------------------------------------
# bases


def bell_basis_2x2() -> np.ndarray:
    """Columns phi+, phi-, psi+, psi- in the basis |00>, |01>, |10>, |11>."""
    s = 1.0 / np.sqrt(2.0)
    return np.array(
        [
            [s, s, 0, 0],
            [0, 0, s, s],
            [0, 0, s, -s],
            [s, -s, 0, 0],
        ],
        dtype=complex,
    )


def icd_basis(theta: float) -> np.ndarray:
    """Columns of the theta-rotated Bell-like basis; Bell basis at theta = pi/4."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [c, s, 0, 0],
            [0, 0, c, s],
            [0, 0, s, -c],
            [s, -c, 0, 0],
        ],
        dtype=complex,
    )


def bd23_basis() -> np.ndarray:
    """Columns of the six Bell-like states of 2 (x) 3.

    Pairs ``(|0a> +- |1b>) / sqrt(2)`` with ``(a, b)`` = (0, 1), (1, 2), (2, 0).
    """
    s = 1.0 / np.sqrt(2.0)
    basis = np.zeros((6, 6), dtype=complex)
    for k, (a, b) in enumerate(((0, 1), (1, 2), (2, 0))):
        basis[a, 2 * k] = basis[a, 2 * k + 1] = s
        basis[3 + b, 2 * k] = s
        basis[3 + b, 2 * k + 1] = -s
    return basis


def _diagonal_in(basis: np.ndarray, p) -> np.ndarray:
    return (basis * np.asarray(p, dtype=float)) @ basis.conj().T


# ---------------------------------------------------------------------------
# constructors


def bd_t(p) -> np.ndarray:
    """Map Bell weights to the correlation vector ``t``."""
    p1, p2, p3, p4 = p
    return np.array([p1 - p2 + p3 - p4, -p1 + p2 + p3 - p4, p1 + p2 - p3 - p4])


def bd_state(params: BdParams) -> DensityMatrix:
    """Bell-diagonal state ``sum_i p_i |psi_i><psi_i|``."""
    return DensityMatrix(_diagonal_in(bell_basis_2x2(), params.p), (2, 2))


def bd_state_pauli(params: BdParams) -> DensityMatrix:
    """Bell-diagonal state from its correlation form ``(I + sum t_i s_i (x) s_i) / 4``."""
    m = np.eye(4, dtype=complex)
    for ti, s in zip(params.t, PAULIS):
        m = m + ti * kron(s, s)
    return DensityMatrix(m / 4.0, (2, 2))


def icd_state(params: IcdParams) -> DensityMatrix:
    return DensityMatrix(_diagonal_in(icd_basis(params.theta), params.p), (2, 2))


def bd23_state(params: Bd23Params) -> DensityMatrix:
    return DensityMatrix(_diagonal_in(bd23_basis(), params.p), (2, 3))


def werner_matrix(d: int, f: float) -> np.ndarray:
    n = d * d
    return ((d - f) * np.eye(n) + (d * f - 1) * flip_operator(d)) / (d**3 - d)


def werner(params: WernerParams) -> DensityMatrix:
    return DensityMatrix(werner_matrix(params.d, params.f), (params.d, params.d))


def isotropic_matrix(d: int, F: float) -> np.ndarray:
    n = d * d
    P = projector(maximally_entangled(d))
    return (1 - F) / (n - 1) * (np.eye(n) - P) + F * P


def isotropic(params: IsotropicParams) -> DensityMatrix:
    return DensityMatrix(isotropic_matrix(params.d, params.F), (params.d, params.d))


def _horo33_sigmas() -> tuple[np.ndarray, np.ndarray]:
    def mix(pairs):
        m = np.zeros((9, 9), dtype=complex)
        for a, b in pairs:
            m[3 * a + b, 3 * a + b] = 1.0 / 3.0
        return m

    return mix(((0, 1), (1, 2), (2, 0))), mix(((1, 0), (2, 1), (0, 2)))


def horo33_matrix(alpha: float) -> np.ndarray:
    """3 (x) 3 family matrix; a valid state for any alpha in [0, 5]."""
    if not (0.0 <= alpha <= 5.0):
        raise ValueError(f"alpha = {alpha!r} outside [0, 5]")
    sp, sm = _horo33_sigmas()
    return 2.0 / 7.0 * projector(maximally_entangled(3)) + alpha / 7.0 * sp + (5.0 - alpha) / 7.0 * sm


def horo33(params: Horo33Params) -> DensityMatrix:
    return DensityMatrix(horo33_matrix(params.alpha), (3, 3))


def multi_iso_threshold(d: int, n: int) -> float:
    """Separability threshold ``r0 = 1 / (1 + d^(n-1))``."""
    return 1.0 / (1.0 + d ** (n - 1))


def multi_iso_floor(d: int, n: int) -> float:
    """Smallest ``r`` giving a valid state, ``1 / (1 - d^n)``."""
    return 1.0 / (1.0 - d**n)


def multi_isotropic_matrix(d: int, n: int, r: float) -> np.ndarray:
    """Family matrix; a valid state for ``r`` in ``[1/(1-d^n), 1]``."""
    D = d**n
    if not (multi_iso_floor(d, n) - PROB_TOL <= r <= 1.0 + PROB_TOL):
        raise ValueError(f"r = {r!r} does not give a valid state")
    return (1 - r) / D * np.eye(D) + r * projector(maximally_entangled(d, n))


def multi_isotropic(params: MultiIsoParams) -> DensityMatrix:
    return DensityMatrix(multi_isotropic_matrix(params.d, params.n, params.r), (params.d,) * params.n)


def family_state(desc: FamilyDescriptor) -> DensityMatrix:
    """Density matrix for any family descriptor."""
    builders = {
        "bd": bd_state,
        "icd": icd_state,
        "bd23": bd23_state,
        "werner": werner,
        "isotropic": isotropic,
        "horo33": horo33,
        "multiiso": multi_isotropic,
    }
    return builders[desc.family](desc)


# ---------------------------------------------------------------------------
# sampling


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform point of the probability simplex via sorted uniform spacings."""
    cuts = np.sort(rng.random(n - 1))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def random_density_matrix(rng: np.random.Generator, n: int = 4, dims=(2, 2)) -> DensityMatrix:
    """``G G^H / Tr(G G^H)`` with a standard complex Gaussian ``G``."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return DensityMatrix.from_operator(g @ g.conj().T, dims)


# ---------------------------------------------------------------------------
# Wootters decomposition


@dataclass(frozen=True, eq=False)
class WoottersData:
    """Wootters decomposition ``rho = sum_i |x_i><x_i|`` with ``<x_i|x~_j> = lambda_i delta_ij``.

    Attributes
    ----------
    lam : ndarray
        Decreasing nonnegative values ``lambda_1 >= ... >= lambda_4``.
    basis : ndarray
        Subnormalized vectors ``|x_i>`` as columns.
    K : ndarray or None
        ``<x_i|x_i> / lambda_i``; ``None`` when ``rho`` is rank deficient.
    C : float
        Concurrence ``max(0, lambda_1 - lambda_2 - lambda_3 - lambda_4)``.
    """

    lam: np.ndarray
    basis: np.ndarray
    K: np.ndarray | None
    C: float
    full_rank: bool = field(default=True)

    @property
    def normalized_basis(self) -> np.ndarray:
        """Vectors ``|x'_i> = |x_i> / sqrt(lambda_i)`` with ``<x'_i|x~'_j> = delta_ij``."""
        if not self.full_rank:
            raise ValueError("normalized Wootters vectors need a full-rank state")
        return self.basis / np.sqrt(self.lam)

    @property
    def P(self) -> np.ndarray:
        """Simplex coordinates ``P_i = lambda_i K_i``, summing to one."""
        if self.K is None:
            raise ValueError("K is unavailable for a rank-deficient state")
        return self.lam * self.K


def spin_flip(v: np.ndarray) -> np.ndarray:
    """Spin-flipped vector(s) ``sigma_y (x) sigma_y |v*>``."""
    return SPIN_FLIP @ np.conj(v)


def takagi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization of a complex symmetric matrix.

    Returns ``d`` (nonnegative, decreasing) and unitary ``q`` with
    ``a @ q.conj() = q @ diag(d)``, i.e. ``a = q diag(d) q^T``.

    The real symmetric embedding ``[[Re a, Im a], [Im a, -Re a]]`` has spectrum
    ``+-d``; the eigenvectors ``[u; w]`` of its top half give ``q = u + i w``.
    This stays well defined when singular values are degenerate.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    h = np.block([[a.real, a.imag], [a.imag, -a.real]])
    w, v = np.linalg.eigh(h)
    top = np.argsort(-w, kind="stable")[:n]
    q = v[:n, top] + 1j * v[n:, top]
    return np.clip(w[top], 0.0, None), q


def concurrence(rho: DensityMatrix) -> float:
    """Concurrence from the square roots of the eigenvalues of ``rho rho~``."""
    m = rho.matrix
    tilde = SPIN_FLIP @ m.conj() @ SPIN_FLIP
    ev = np.sort(np.sqrt(np.clip(np.linalg.eigvals(m @ tilde).real, 0.0, None)))[::-1]
    return max(0.0, float(ev[0] - ev[1:].sum()))


def wootters_decompose(rho: DensityMatrix) -> WoottersData:
    """Wootters decomposition of a two-qubit density matrix.

    Eigenvectors of ``rho`` scaled by the square roots of their eigenvalues
    give ``rho = V V^H``. The symmetric matrix ``tau = V^T Y V`` (``Y`` the
    spin flip) is Takagi factorized, ``tau = Q D Q^T``, and ``X = V Q*``
    satisfies ``X^T Y X = D`` while keeping ``X X^H = rho``.
    """
    if rho.dims != (2, 2):
        raise ValueError(f"Wootters decomposition needs dims (2, 2), got {rho.dims}")
    mu, e = eig_hermitian(rho.matrix)
    v = e * np.sqrt(np.clip(mu, 0.0, None))
    tau = v.T @ SPIN_FLIP @ v
    lam, q = takagi(tau)
    x = v @ q.conj()
    C = max(0.0, float(lam[0] - lam[1:].sum()))
    if lam[3] < RANK_TOL:
        return WoottersData(lam=lam, basis=x, K=None, C=C, full_rank=False)
    K = np.einsum("ij,ij->j", x.conj(), x).real / lam
    return WoottersData(lam=lam, basis=x, K=K, C=C)
