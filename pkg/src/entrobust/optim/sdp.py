"""Small dense semidefinite programs with duality certificates.

Primal (``P``)::

    minimize    c^T x
    subject to  F(x) = F0 + sum_i x_i F_i  >= 0

Dual (``D``)::

    maximize    -Tr(F0 Z)
    subject to  Z >= 0,  Tr(F_i Z) = c_i

The duality gap is ``c^T x + Tr(F0 Z) = Tr(F(x) Z) >= 0`` for feasible pairs.

The solver is a primal-dual interior-point method with the HKM search
direction and Mehrotra predictor-corrector steps, acting on complex
Hermitian blocks directly. In its internal "standard form" the roles are
swapped: ``Z`` is the primal matrix, ``y = -x`` the dual vector and
``S = F(x)`` the dual slack. Block structure is read off the union sparsity
pattern of ``F0, F_1, ...``; equal-sized blocks are processed as batches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

MAX_ITER = 500
DEFAULT_TOL = 1e-8
FEAS_TOL = 1e-9
RAY_TOL = 1e-8
RAY_SCALE = 1e8


class SdpError(RuntimeError):
    """Base class of solver failures."""


class Infeasible(SdpError):
    """``P`` is infeasible; ``certificate`` is ``Z >= 0`` with ``Tr(F_i Z) ~ 0`` and ``Tr(F0 Z) = -1``."""

    def __init__(self, message: str, certificate: np.ndarray | None = None, diagnostics: dict | None = None):
        super().__init__(message)
        self.certificate = certificate
        self.diagnostics = diagnostics or {}


class Unbounded(SdpError):
    """``P`` is unbounded below (``D`` infeasible); ``certificate`` is an improving direction ``d``."""

    def __init__(self, message: str, certificate: np.ndarray | None = None, diagnostics: dict | None = None):
        super().__init__(message)
        self.certificate = certificate
        self.diagnostics = diagnostics or {}


class NotConverged(SdpError):
    """Iteration cap or numerical breakdown before meeting the tolerances."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _hermitian(m: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    if np.max(np.abs(m - np.swapaxes(m.conj(), -1, -2)), initial=0.0) > 1e-10:
        raise ValueError(f"{name} is not Hermitian")
    return 0.5 * (m + np.swapaxes(m.conj(), -1, -2))


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """Data ``(c, F0, F_1..F_m)`` of the primal problem."""

    c: np.ndarray
    F0: np.ndarray
    Fi: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        F0 = np.asarray(self.F0, dtype=complex)
        Fi = np.asarray(self.Fi, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise ValueError("c has non-finite entries")
        if F0.ndim != 2 or F0.shape[0] != F0.shape[1]:
            raise ValueError("F0 must be a square matrix")
        n = F0.shape[0]
        if Fi.ndim == 2 and c.size == 1:
            Fi = Fi[None]
        if Fi.shape != (c.size, n, n):
            raise ValueError(f"Fi must have shape ({c.size}, {n}, {n}), got {Fi.shape}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "F0", _hermitian(F0, "F0"))
        object.__setattr__(self, "Fi", _hermitian(Fi, "Fi"))

    @property
    def m(self) -> int:
        return self.c.size

    @property
    def n(self) -> int:
        return self.F0.shape[0]

    def F(self, x) -> np.ndarray:
        """``F0 + sum_i x_i F_i``."""
        return self.F0 + np.tensordot(np.asarray(x, dtype=float), self.Fi, axes=1)

    def trace_Fi(self, Z) -> np.ndarray:
        """``Re Tr(F_i Z)`` for every ``i``."""
        return np.einsum("iab,ba->i", self.Fi, Z).real


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Primal-dual pair with certificates.

    ``gap = c^T x + Tr(F0 Z)``; ``slackness_residual = ||F(x) Z||_F``;
    ``dual_residual = max_i |Tr(F_i Z) - c_i|``. ``history`` holds per-iterate
    gap, residuals and ``mu``.
    """

    x: np.ndarray
    Z: np.ndarray
    p_star: float
    d_star: float
    gap: float
    slackness_residual: float
    dual_residual: float
    primal_min_eig: float
    dual_min_eig: float
    iterations: int
    history: tuple = field(default=(), repr=False)

    def certificates(self) -> dict:
        return {
            "gap": self.gap,
            "slackness_residual": self.slackness_residual,
            "dual_residual": self.dual_residual,
            "primal_min_eig": self.primal_min_eig,
            "dual_min_eig": self.dual_min_eig,
            "iterations": float(self.iterations),
        }


def check_slackness(F_at_x, Z) -> float:
    """Frobenius norm of ``F(x) Z``; zero exactly at complementary pairs."""
    return float(np.linalg.norm(np.asarray(F_at_x) @ np.asarray(Z)))


# ---------------------------------------------------------------------------
# block bookkeeping


class _Blocks:
    """Problem data split into batches of equal-sized diagonal blocks."""

    def __init__(self, problem: SdpProblem):
        n = problem.n
        pattern = (np.abs(problem.F0) > 0) | np.any(np.abs(problem.Fi) > 0, axis=0)
        _, labels = connected_components(csr_matrix(pattern), directed=False)
        comps = [np.flatnonzero(labels == k) for k in range(labels.max() + 1)]
        # indices untouched by every matrix carry F(x) = 0 and Z = 0
        comps = [ix for ix in comps if pattern[np.ix_(ix, ix)].any()]
        if not comps:
            raise ValueError("problem has no nonzero constraint data")
        self.n = n
        self.m = problem.m
        self.groups = []
        for size in sorted({len(ix) for ix in comps}):
            idx = np.array([ix for ix in comps if len(ix) == size])
            r, s = idx[:, :, None], idx[:, None, :]
            C = problem.F0[r, s]
            A = problem.Fi[:, r, s]
            self.groups.append((idx, C, A, A.reshape(self.m, -1).conj()))
        self.order = sum(idx.size for idx, *_ in self.groups)

    def op_A(self, Xs) -> np.ndarray:
        """``Re Tr(F_i X)``."""
        out = np.zeros(self.m)
        for (_, _, _, Ac), X in zip(self.groups, Xs):
            out += (Ac @ X.reshape(-1)).real
        return out

    def op_AT(self, y) -> list:
        """``sum_i y_i F_i`` per block."""
        return [np.tensordot(y, A, axes=1) for (_, _, A, _) in self.groups]

    def schur(self, Xs, Sinvs) -> np.ndarray:
        """``M_ij = Re Tr(F_i X F_j S^-1)``."""
        M = np.zeros((self.m, self.m))
        for (_, _, A, Ac), X, Si in zip(self.groups, Xs, Sinvs):
            G = X[None] @ A @ Si[None]
            M += (Ac @ G.reshape(self.m, -1).T).real
        return 0.5 * (M + M.T)

    def assemble(self, blocks) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex)
        for (idx, *_), B in zip(self.groups, blocks):
            for ix, b in zip(idx, B):
                out[np.ix_(ix, ix)] = b
        return out

    def split(self, M: np.ndarray) -> list:
        return [M[idx[:, :, None], idx[:, None, :]] for idx, *_ in self.groups]


def _herm(B):
    return 0.5 * (B + np.swapaxes(B.conj(), -1, -2))


def _inner(Xs, Ys) -> float:
    return float(sum(np.vdot(X, Y).real for X, Y in zip(Xs, Ys)))


def _chol(Bs):
    """Batched Cholesky factors, or None if any block is not positive definite."""
    try:
        return [np.linalg.cholesky(B) for B in Bs]
    except np.linalg.LinAlgError:
        return None


def _max_step(Ls, Ds) -> float:
    """Largest ``a`` keeping ``L L^H + a D`` positive semidefinite."""
    worst = 0.0
    for L, D in zip(Ls, Ds):
        Li = np.linalg.inv(L)
        W = Li @ D @ np.swapaxes(Li.conj(), -1, -2)
        worst = min(worst, float(np.linalg.eigvalsh(_herm(W)).min()))
    return np.inf if worst >= 0 else -1.0 / worst


def _chol_inverse(Ls):
    out = []
    for L in Ls:
        Li = np.linalg.inv(L)
        out.append(np.swapaxes(Li.conj(), -1, -2) @ Li)
    return out


# ---------------------------------------------------------------------------
# solver


def solve_sdp(
    problem: SdpProblem,
    tol: float = DEFAULT_TOL,
    *,
    x0=None,
    Z0=None,
    max_iter: int = MAX_ITER,
    feas_tol: float = FEAS_TOL,
) -> SdpSolution:
    """Solve ``P`` and ``D`` to duality gap ``tol``.

    Parameters
    ----------
    problem : SdpProblem
    tol : float
        Target for the duality gap ``c^T x + Tr(F0 Z)``.
    x0, Z0 : optional
        Strictly feasible starting pair (``F(x0) > 0``, ``Z0 > 0``,
        ``Tr(F_i Z0) = c_i``). With it the method is a feasible path-following
        scheme and every iterate satisfies weak duality. Without it an
        infeasible start on a scaled identity is used.
    max_iter : int
    feas_tol : float
        Bound on the primal and dual equality residuals at termination.

    Raises
    ------
    Infeasible
        ``P`` has no feasible point; carries a normalized ray ``Z``.
    Unbounded
        ``P`` is unbounded below.
    NotConverged
        Iteration cap reached or the iterates lost definiteness.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    blk = _Blocks(problem)
    b = problem.c
    Cs = [C for _, C, _, _ in blk.groups]
    N = blk.order
    y = np.zeros(blk.m)

    if x0 is not None and Z0 is not None:
        y = -np.asarray(x0, dtype=float).copy()
        S = blk.split(problem.F(x0))
        X = blk.split(np.asarray(Z0, dtype=complex))
        X = [_herm(B) for B in X]
        S = [_herm(B) for B in S]
        if _chol(X) is None or _chol(S) is None:
            raise ValueError("starting pair is not strictly feasible")
    else:
        norm_A = max(1.0, float(np.max(np.linalg.norm(problem.Fi.reshape(blk.m, -1), axis=1))))
        xi = max(10.0, np.sqrt(N), N * float(np.max((1 + np.abs(b)) / (1 + norm_A))))
        eta = max(10.0, np.sqrt(N), norm_A, float(np.linalg.norm(problem.F0)))
        X = [xi * np.broadcast_to(np.eye(idx.shape[1]), C.shape).astype(complex) for idx, C, _, _ in blk.groups]
        S = [eta * np.broadcast_to(np.eye(idx.shape[1]), C.shape).astype(complex) for idx, C, _, _ in blk.groups]

    scale = 1.0 + max(np.max(np.abs(b), initial=0.0), float(np.max(np.abs(problem.F0))))
    history = []
    stalls = 0

    def diagnostics(it):
        return {"iterations": it, "last": history[-1] if history else None}

    for it in range(max_iter + 1):
        ATy = blk.op_AT(y)
        rp = b - blk.op_A(X)
        Rd = [C - Sb - Ab for C, Sb, Ab in zip(Cs, S, ATy)]
        pobj = _inner(Cs, X)
        dobj = float(b @ y)
        gap = pobj - dobj
        xs = _inner(X, S)
        mu = xs / N
        rp_n = float(np.max(np.abs(rp), initial=0.0))
        rd_n = max(float(np.max(np.abs(R))) for R in Rd)
        slack = float(np.sqrt(sum(np.sum(np.abs(Xb @ Sb) ** 2) for Xb, Sb in zip(X, S))))
        history.append({"gap": gap, "mu": mu, "primal_residual": rd_n, "dual_residual": rp_n, "slackness": slack})

        # ||X S|| can exceed sqrt(<X, S>) when the iterates are large, so both are tested
        converged = max(gap, xs) <= tol and gap >= -tol and slack <= np.sqrt(tol)
        if converged and rp_n <= feas_tol and rd_n <= feas_tol:
            break

        if it == max_iter:
            raise NotConverged(f"iteration cap {max_iter} reached", diagnostics(it))

        # infeasibility rays
        if pobj < -RAY_SCALE * scale:
            Zr = [B / -pobj for B in X]
            if float(np.max(np.abs(blk.op_A(Zr)))) <= RAY_TOL:
                raise Infeasible(
                    "primal problem is infeasible",
                    certificate=blk.assemble(Zr),
                    diagnostics=diagnostics(it),
                )
        if dobj > RAY_SCALE * scale:
            raise Unbounded("primal problem is unbounded below", certificate=-y / dobj, diagnostics=diagnostics(it))

        Lx, Ls = _chol(X), _chol(S)
        if Lx is None or Ls is None:
            raise NotConverged("iterates lost positive definiteness", diagnostics(it))
        Sinv = _chol_inverse(Ls)
        M = blk.schur(X, Sinv)
        try:
            Mf = sla.cho_factor(M)
        except np.linalg.LinAlgError:
            M = M + 1e-14 * np.trace(M) / blk.m * np.eye(blk.m)
            try:
                Mf = sla.cho_factor(M)
            except np.linalg.LinAlgError:
                raise NotConverged("Schur complement is singular", diagnostics(it)) from None
        XRdS = [Xb @ R @ Si for Xb, R, Si in zip(X, Rd, Sinv)]

        def direction(Rc):
            W = [R @ Si - T for R, Si, T in zip(Rc, Sinv, XRdS)]
            dy = sla.cho_solve(Mf, rp - blk.op_A(W))
            ATdy = blk.op_AT(dy)
            dX = [_herm(Wb + Xb @ Ab @ Si) for Wb, Xb, Ab, Si in zip(W, X, ATdy, Sinv)]
            dS = [R - Ab for R, Ab in zip(Rd, ATdy)]
            return dX, dy, dS

        XS = [Xb @ Sb for Xb, Sb in zip(X, S)]
        dXa, _, dSa = direction([-T for T in XS])
        ap = min(1.0, _max_step(Lx, dXa))
        ad = min(1.0, _max_step(Ls, dSa))
        mu_aff = _inner([Xb + ap * D for Xb, D in zip(X, dXa)], [Sb + ad * D for Sb, D in zip(S, dSa)]) / N
        sigma = min(1.0, max(0.0, mu_aff / mu) ** 3) if mu > 0 else 0.0
        eye = [np.broadcast_to(np.eye(Xb.shape[-1]), Xb.shape) for Xb in X]
        Rc = [sigma * mu * I - T - Da @ Ea for I, T, Da, Ea in zip(eye, XS, dXa, dSa)]
        dX, dy, dS = direction(Rc)
        amax_p, amax_d = _max_step(Lx, dX), _max_step(Ls, dS)
        gamma = 0.9 + 0.09 * min(1.0, amax_p, amax_d)
        ap = min(1.0, gamma * amax_p)
        ad = min(1.0, gamma * amax_d)
        if max(ap, ad) < 1e-10:
            stalls += 1
            if stalls > 5:
                raise NotConverged("step lengths collapsed", diagnostics(it))
        else:
            stalls = 0
        X = [_herm(Xb + ap * D) for Xb, D in zip(X, dX)]
        S = [_herm(Sb + ad * D) for Sb, D in zip(S, dS)]
        y = y + ad * dy

    x = -y
    Z = blk.assemble(X)
    Fx = problem.F(x)
    p_star = float(b @ x)
    d_star = float(-np.vdot(problem.F0, Z).real)
    return SdpSolution(
        x=x,
        Z=Z,
        p_star=p_star,
        d_star=d_star,
        gap=p_star - d_star,
        slackness_residual=check_slackness(Fx, Z),
        dual_residual=float(np.max(np.abs(problem.trace_Fi(Z) - b), initial=0.0)),
        primal_min_eig=float(np.linalg.eigvalsh(Fx).min()),
        dual_min_eig=float(np.linalg.eigvalsh(Z).min()),
        iterations=it,
        history=tuple(history),
    )
