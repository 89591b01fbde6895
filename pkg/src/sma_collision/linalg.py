"""Sparse SPD solves and Dirichlet elimination."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool


def solve_spd(A, b, tol: float = DEFAULT_TOL, max_iter: int | None = None, x0=None):
    """Jacobi-preconditioned conjugate gradients.

    Returns ``(x, SolveReport)``; ``final_residual`` is ``||b - Ax|| / ||b||``.
    Raises :class:`SolverError` when a search direction has nonpositive
    curvature, which means ``A`` is not SPD.
    """
    A = sp.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"dimension mismatch: A {A.shape}, b {b.shape}")
    if max_iter is None:
        max_iter = 10 * n
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True)
    d = A.diagonal()
    if np.any(d <= 0.0):
        raise SolverError("nonpositive diagonal entry; matrix is not SPD")
    inv_d = 1.0 / d

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    rel = np.linalg.norm(r) / bnorm
    if rel <= tol:
        return x, SolveReport(0, rel, True)
    z = inv_d * r
    p = z.copy()
    rz = r @ z
    for it in range(1, max_iter + 1):
        Ap = A @ p
        curv = p @ Ap
        if not curv > 0.0:
            raise SolverError(f"negative curvature {curv:.3e} at iteration {it}; matrix is not SPD")
        alpha = rz / curv
        x += alpha * p
        r -= alpha * Ap
        rel = np.linalg.norm(r) / bnorm
        if rel <= tol:
            # recompute to guard against drift of the recursive residual
            rel = np.linalg.norm(b - A @ x) / bnorm
            if rel <= tol:
                return x, SolveReport(it, rel, True)
        z = inv_d * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, SolveReport(max_iter, rel, False)


def apply_dirichlet(A, b, fixed):
    """Symmetric elimination of prescribed unknowns.

    ``fixed`` maps index to value.  Rows and columns of the fixed indices are
    zeroed, their diagonal set to 1 and ``b`` corrected, so ``A'`` stays SPD
    and ``A' x = b'`` returns the prescribed values exactly.
    """
    A = sp.csr_matrix(A)
    b = np.array(b, dtype=float)
    if not fixed:
        return A, b
    idx = np.fromiter(fixed.keys(), dtype=np.int64)
    val = np.fromiter(fixed.values(), dtype=float)
    n = A.shape[0]
    if np.any((idx < 0) | (idx >= n)):
        raise IndexError("fixed index out of range")
    g = np.zeros(n)
    g[idx] = val
    b -= A @ g
    keep = np.ones(n)
    keep[idx] = 0.0
    K = sp.diags(keep)
    A2 = (K @ A @ K).tocsr()
    A2 = A2 + sp.diags(1.0 - keep)
    A2 = sp.csr_matrix(A2)
    A2.eliminate_zeros()
    b[idx] = val
    return A2, b


class DirectSolver:
    """Sparse LU factorization kept for repeated right-hand sides."""

    def __init__(self, A):
        A = sp.csc_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"matrix must be square, got {A.shape}")
        self.shape = A.shape
        self._A = A
        try:
            self._lu = spla.splu(A)
        except RuntimeError as exc:
            raise SolverError(f"factorization failed: {exc}") from exc

    def solve(self, b, refine: int = 1):
        b = np.asarray(b, dtype=float)
        x = self._lu.solve(b)
        for _ in range(refine):
            x += self._lu.solve(b - self._A @ x)
        if not np.all(np.isfinite(x)):
            raise SolverError("direct solve produced non-finite values")
        return x
