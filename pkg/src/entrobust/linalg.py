"""Dense complex-matrix kernel.

Hermitian algebra, Kronecker products, partial transposition, Hermitian
eigendecomposition and the :class:`DensityMatrix` value type.

Bipartite bases are ordered lexicographically: ``|i>|j> -> i * dB + j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
EIG_HERMITIAN_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_matrix(a) -> np.ndarray:
    """Return `a` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part ``(m + m^H) / 2``."""
    return 0.5 * (m + m.conj().T)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    """Kronecker product of several matrices, left to right."""
    return reduce(kron, factors)


def flip_operator(d: int) -> np.ndarray:
    """Swap operator ``sum_ij |ij><ji|`` on ``C^d (x) C^d``."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def maximally_entangled(d: int, n: int = 2) -> np.ndarray:
    """The vector ``sum_i |i...i> / sqrt(d)`` on ``n`` qudits."""
    v = np.zeros(d**n, dtype=complex)
    stride = sum(d**k for k in range(n))
    v[np.arange(d) * stride] = 1.0 / np.sqrt(d)
    return v


def projector(v) -> np.ndarray:
    """Rank-one operator ``|v><v|``."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def partial_transpose_matrix(m: np.ndarray, dims, subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a bipartite operator given as a raw array.

    Parameters
    ----------
    m : ndarray
        Operator of order ``dims[0] * dims[1]``.
    dims : sequence of two ints
        Subsystem dimensions ``(dA, dB)``.
    subsystem : {0, 1}
        Which factor to transpose.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2:
        raise ValueError(f"partial transpose needs exactly two subsystems, got dims {dims}")
    if subsystem not in (0, 1):
        raise ValueError(f"invalid subsystem index {subsystem}")
    da, db = dims
    n = da * db
    if m.shape != (n, n):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    t = m.reshape(da, db, da, db)
    t = t.transpose(0, 3, 2, 1) if subsystem == 1 else t.transpose(2, 1, 0, 3)
    return t.reshape(n, n)


def partial_transpose(rho: "DensityMatrix", subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a bipartite density matrix on `subsystem`."""
    return partial_transpose_matrix(rho.matrix, rho.dims, subsystem)


def eig_hermitian(m, tol: float = EIG_HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns
    -------
    w : ndarray
        Real eigenvalues sorted in decreasing order.
    v : ndarray
        Orthonormal eigenvectors as columns, ``m = v @ diag(w) @ v^H``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix is not square")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(hermitize(m))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(hermitize(as_matrix(m)))[0])


def is_psd(m, tol: float = PSD_TOL) -> bool:
    """True when the Hermitian matrix has no eigenvalue below ``-tol``."""
    return min_eigenvalue(m) >= -tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims.

    Construction validates the invariants and raises ``ValueError`` when any
    fails. ``dims`` multiplies to the matrix order.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
            raise ValueError(f"dims {dims} do not match matrix order {m.shape[0]}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(m).real!r} is not 1")
        if min_eigenvalue(m) < -PSD_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        m = hermitize(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_operator(cls, m, dims) -> "DensityMatrix":
        """Build from a PSD operator after symmetrizing and normalizing the trace."""
        m = hermitize(as_matrix(m))
        return cls(m / np.trace(m).real, tuple(dims))

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues, descending."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def partial_transpose(self, subsystem: int = 1) -> np.ndarray:
        return partial_transpose(self, subsystem)
