"""Robustness of entanglement over PPT states as a single SDP.

For a bipartite ``rho`` the program is::

    minimize    Tr X
    subject to  X >= 0,  X^TB >= 0,  (rho + X)^TB >= 0

over Hermitian ``X``. Then ``s = Tr X``, ``rho'' = X / s`` and
``rho' = (rho + X) / (1 + s)``. On 2x2 and 2x3 PPT equals separability and
``s`` is the robustness; otherwise it is a lower bound.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..analytic import RobustnessResult, witness_certificates
from ..linalg import DensityMatrix, min_eigenvalue, partial_transpose_matrix
from ..separability import BOUNDARY_TOL, PPT_EXACT_DIMS, is_ppt
from .sdp import DEFAULT_TOL, SdpProblem, solve_sdp


@lru_cache(maxsize=None)
def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal basis of ``n x n`` Hermitian matrices under ``Re Tr(A B)``.

    Order: ``E_kk``, then for ``k < l`` the pair ``(E_kl + E_lk)/sqrt 2``,
    ``i (E_kl - E_lk)/sqrt 2``.
    """
    out = []
    for k in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[k, k] = 1.0
        out.append(e)
    r = 1.0 / np.sqrt(2.0)
    for k in range(n):
        for l in range(k + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = e[l, k] = r
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = 1j * r
            e[l, k] = -1j * r
            out.append(e)
    basis = np.array(out)
    basis.setflags(write=False)
    return basis


def hermitian_coordinates(m: np.ndarray) -> np.ndarray:
    """Coordinates of a Hermitian matrix in :func:`hermitian_basis`."""
    B = hermitian_basis(m.shape[0])
    return np.einsum("iab,ba->i", B, m).real


@lru_cache(maxsize=None)
def _constraint_blocks(dims: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    n = dims[0] * dims[1]
    B = hermitian_basis(n)
    BT = np.array([partial_transpose_matrix(b, dims) for b in B])
    Fi = np.zeros((B.shape[0], 3 * n, 3 * n), dtype=complex)
    Fi[:, :n, :n] = B
    Fi[:, n : 2 * n, n : 2 * n] = BT
    Fi[:, 2 * n :, 2 * n :] = BT
    c = np.trace(B, axis1=1, axis2=2).real
    Fi.setflags(write=False)
    c.setflags(write=False)
    return c, Fi


def ppt_robustness_problem(rho: DensityMatrix) -> SdpProblem:
    """SDP data for :func:`robustness_ppt_sdp`; ``x`` are the coordinates of ``X``."""
    if not rho.is_bipartite:
        raise ValueError(f"PPT robustness needs a bipartite state, got dims {rho.dims}")
    dims = rho.dims
    n = rho.order
    c, Fi = _constraint_blocks(dims)
    F0 = np.zeros((3 * n, 3 * n), dtype=complex)
    F0[2 * n :, 2 * n :] = partial_transpose_matrix(rho.matrix, dims)
    return SdpProblem(c=c, F0=F0, Fi=Fi)


def ppt_robustness_start(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Strictly feasible pair: ``X = I`` and ``Z = I/3`` on every block.

    ``(rho + I)^TB > 0`` because partial-transpose eigenvalues are at least
    ``-1/2``; the dual constraint ``Z1 + Z2^TB + Z3^TB = I`` holds by
    construction.
    """
    x0 = hermitian_coordinates(np.eye(n, dtype=complex))
    Z0 = np.eye(3 * n, dtype=complex) / 3.0
    return x0, Z0


def robustness_ppt_sdp(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> RobustnessResult:
    """Robustness of entanglement relative to PPT states.

    Separable (PPT) inputs return ``s = 0`` with ``rho' = rho'' = rho``
    without calling the solver. Results on dims other than 2x2 / 2x3 carry
    the ``ppt_lower_bound`` flag.
    """
    verdict = is_ppt(rho)
    exact = rho.dims in PPT_EXACT_DIMS
    flags = {"ppt_lower_bound": not exact}
    if verdict.margin >= -BOUNDARY_TOL:
        flags["separable_input"] = True
        return RobustnessResult(
            s=0.0,
            rho_prime=rho,
            rho_dprime=rho,
            method="sdp",
            certificates={"pt_min_eig": verdict.margin},
            flags=flags,
        )
    n = rho.order
    problem = ppt_robustness_problem(rho)
    x0, Z0 = ppt_robustness_start(n)
    sol = solve_sdp(problem, tol, x0=x0, Z0=Z0)
    X = problem.F(sol.x)[:n, :n]
    X = 0.5 * (X + X.conj().T)
    s = float(np.trace(X).real)
    rho_dprime = DensityMatrix.from_operator(X, rho.dims)
    rho_prime = DensityMatrix.from_operator(rho.matrix + X, rho.dims)
    cert = sol.certificates()
    cert.update(witness_certificates(rho, rho_prime, rho_dprime, s))
    flags["separable_input"] = False
    return RobustnessResult(s=s, rho_prime=rho_prime, rho_dprime=rho_dprime, method="sdp", certificates=cert, flags=flags)


def optimal_mixing_weight(rho: DensityMatrix, rho_prime: DensityMatrix, tol: float = DEFAULT_TOL) -> float:
    """Largest ``L`` with ``rho' - L rho >= 0``, solved as an SDP.

    With ``rho' = (rho + s rho'') / (1 + s)`` one has ``L >= 1/(1+s)``; for
    an optimal witness pair ``s = 1/L - 1``.
    """
    problem = SdpProblem(c=np.array([-1.0]), F0=rho_prime.matrix, Fi=-rho.matrix[None])
    sol = solve_sdp(problem, tol)
    return float(sol.x[0])


def pt_min_eig(rho: DensityMatrix) -> float:
    return min_eigenvalue(partial_transpose_matrix(rho.matrix, rho.dims))
