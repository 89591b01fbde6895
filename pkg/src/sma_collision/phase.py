"""Phase fractions after the collision: a variational inequality on K.

With ``beta1 = 1 - chi2 - chi3`` eliminated, the pair ``chi = (chi2, chi3)``
solves, nodewise in P1 with lumped mass ``M_L``,

    (S kron M2) chi + M_L xi = F(T),    xi in N_K(chi),
    S    = c M_L + (upsilon + kappa) A,
    F(T) = (c M_L + upsilon A) chi- M2 + boundary flux M2
           + M_L (0, l_a/T0 (T - T0)),

where ``A`` is the scalar stiffness, ``M2`` the variant's coupling matrix and
``N_K`` the normal cone of the triangle ``K = {chi2, chi3 >= 0,
chi2 + chi3 <= 1}``.  The reaction ``xi`` is reported as a density (the
nodal residual divided by the lumped mass).

The default solver is a primal-dual active set (semismooth Newton) method:
every node is assigned the face of K reached by projecting
``chi + xi/gamma``; the equation restricted to those faces is solved
directly, and the loop ends when the faces stop changing.  A projected block
Gauss-Seidel solver with exact local QPs is kept as an alternative.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fem, kernels
from .errors import SolverError
from .linalg import DirectSolver, SolveReport
from .mesh import Mesh
from .params import MaterialParams, PhaseVariant, check_beta

logger = logging.getLogger(__name__)

K_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

# per face: (basis columns, offset point)
_FACE_BASIS = {
    kernels.FACE_INTERIOR: ([(1.0, 0.0), (0.0, 1.0)], (0.0, 0.0)),
    kernels.FACE_X0: ([(0.0, 1.0)], (0.0, 0.0)),
    kernels.FACE_Y0: ([(1.0, 0.0)], (0.0, 0.0)),
    kernels.FACE_HYP: ([(1.0, -1.0)], (0.0, 1.0)),
    kernels.VERTEX_00: ([], (0.0, 0.0)),
    kernels.VERTEX_10: ([], (1.0, 0.0)),
    kernels.VERTEX_01: ([], (0.0, 1.0)),
}


@dataclass(frozen=True)
class PhasePair:
    chi2: np.ndarray
    chi3: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        return np.column_stack([self.chi2, self.chi3])

    def betas(self) -> np.ndarray:
        """``(beta1, beta2, beta3)`` per node."""
        return np.column_stack([1.0 - self.chi2 - self.chi3, self.chi2, self.chi3])


@dataclass(frozen=True)
class ReactionPair:
    xi2: np.ndarray
    xi3: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        return np.column_stack([self.xi2, self.xi3])


def project_onto_K(p, metric=None):
    """Nearest point of K to ``p``.

    Euclidean by default; with a 2x2 SPD ``metric`` H the point minimising
    ``(y - p)' H (y - p)``.
    """
    p = np.asarray(p, dtype=float)
    if metric is None:
        out, _ = kernels.project_triangle(p.reshape(1, 2))
        return out[0].copy()
    H = np.asarray(metric, dtype=float)
    g = H @ p
    return np.array(kernels.local_qp(tuple(H.ravel()), tuple(g)))


def feasibility_violation(chi) -> float:
    chi = np.asarray(chi, dtype=float)
    v = np.maximum.reduce([-chi[:, 0], -chi[:, 1], chi[:, 0] + chi[:, 1] - 1.0])
    return float(max(0.0, v.max(initial=0.0)))


def complementarity_residual(chi, xi) -> float:
    """Largest ``max(0, -xi . (chi - p))`` over nodes and the vertices p of K.

    Zero exactly when every nodal ``xi`` lies in the normal cone of K at
    ``chi``.
    """
    chi = np.asarray(chi, dtype=float)
    xi = np.asarray(xi, dtype=float)
    worst = 0.0
    for v in K_VERTICES:
        prod = np.sum(xi * (chi - v), axis=1)
        worst = max(worst, float(np.max(-prod, initial=0.0)))
    return worst


class PhaseProblem:
    """Discrete phase inequality for fixed mesh, material and pre-state.

    Assembles once; :meth:`solve` may then be called for many temperature
    fields (the coupling loop does this) and reuses factorizations while
    the active faces do not change.
    """

    def __init__(
        self,
        mesh: Mesh,
        params: MaterialParams,
        beta_minus,
        variant: PhaseVariant | None = None,
        flux=None,
    ):
        self.mesh = mesh
        self.params = params
        self.variant = PhaseVariant.parse(variant if variant is not None else params.variant)
        beta_minus = np.broadcast_to(np.asarray(beta_minus, dtype=float), (mesh.n_nodes, 3))
        check_beta(beta_minus)
        self.chi_minus = np.ascontiguousarray(beta_minus[:, 1:3])
        self.M2 = self.variant.coupling
        self.ml = fem.lumped_mass(mesh)
        A = fem.assemble_scalar_stiffness(mesh)
        p = params
        self.S = (sp.diags(p.c * self.ml) + (p.upsilon + p.kappa) * A).tocsr()
        self.B = sp.kron(self.S, sp.csr_matrix(self.M2), format="csr")
        base = p.c * self.ml[:, None] * self.chi_minus + p.upsilon * (A @ self.chi_minus)
        if flux is not None:
            flux = np.broadcast_to(np.asarray(flux, dtype=float), (mesh.n_nodes, 2))
            base = base + np.column_stack(
                [fem.assemble_boundary_load(mesh, flux[:, k]) for k in range(2)]
            )
        self.base_load = base @ self.M2.T
        lam_max = float(np.linalg.eigvalsh(self.M2)[-1])
        self.gamma = self.S.diagonal() * lam_max / self.ml
        self._factors: dict[bytes, tuple] = {}

    def load(self, T) -> np.ndarray:
        """Right-hand side ``F(T)`` as an ``(N, 2)`` array."""
        T = np.broadcast_to(np.asarray(T, dtype=float), (self.mesh.n_nodes,))
        if not np.all(np.isfinite(T)):
            raise ValueError("temperature field must be finite")
        F = self.base_load.copy()
        F[:, 1] += self.ml * (self.params.l_a / self.params.T0) * (T - self.params.T0)
        return F

    def apply(self, chi) -> np.ndarray:
        return (self.S @ chi) @ self.M2.T

    def reactions(self, chi, F) -> np.ndarray:
        return (F - self.apply(chi)) / self.ml[:, None]

    def natural_residual(self, chi, xi) -> float:
        proj, _ = kernels.project_triangle(chi + xi / self.gamma[:, None])
        return float(np.max(np.abs(chi - proj)))

    def solve(self, T, chi0=None, tol: float = 1e-10, max_iter: int | None = None, method: str = "active_set"):
        """Return ``(PhasePair, ReactionPair, SolveReport)`` at temperature ``T``."""
        F = self.load(T)
        chi = self.chi_minus.copy() if chi0 is None else np.array(chi0, dtype=float).reshape(-1, 2)
        chi, _ = kernels.project_triangle(chi)
        if method == "active_set":
            chi, report = self._active_set(F, chi, tol, 100 if max_iter is None else max_iter)
        elif method == "pgs":
            if max_iter is None:
                max_iter = int(200 * np.sqrt(self.mesh.n_nodes))
            chi, report = self._pgs(F, chi, tol, max_iter)
        else:
            raise ValueError(f"unknown method {method!r}")
        chi, _ = kernels.project_triangle(chi)
        xi = self.reactions(chi, F)
        return PhasePair(chi[:, 0].copy(), chi[:, 1].copy()), ReactionPair(xi[:, 0].copy(), xi[:, 1].copy()), report

    def _face_solver(self, faces):
        key = faces.tobytes()
        hit = self._factors.get(key)
        if hit is not None:
            return hit
        n = self.mesh.n_nodes
        rows, cols, vals = [], [], []
        offset = np.zeros((n, 2))
        col = 0
        for f, (basis, point) in _FACE_BASIS.items():
            idx = np.flatnonzero(faces == f)
            if idx.size == 0:
                continue
            offset[idx] = point
            for vec in basis:
                c = col + np.arange(idx.size)
                for comp in range(2):
                    if vec[comp] != 0.0:
                        rows.append(2 * idx + comp)
                        cols.append(c)
                        vals.append(np.full(idx.size, vec[comp]))
                col += idx.size
        if rows:
            rows_a = np.concatenate(rows)
            cols_a = np.concatenate(cols)
            vals_a = np.concatenate(vals)
        else:
            rows_a = cols_a = np.zeros(0, dtype=np.int64)
            vals_a = np.zeros(0)
        T = sp.csr_matrix((vals_a, (rows_a, cols_a)), shape=(2 * n, col))
        solver = None
        if col:
            reduced = (T.T @ self.B @ T).tocsc()
            solver = DirectSolver(reduced)
        entry = (T, offset.reshape(-1), solver)
        if len(self._factors) >= 8:
            self._factors.pop(next(iter(self._factors)))
        self._factors[key] = entry
        return entry

    def _solve_on_faces(self, faces, F):
        T, offset, solver = self._face_solver(faces)
        rhs_full = F.reshape(-1) - self.B @ offset
        x = offset.copy()
        if solver is not None:
            y = solver.solve(T.T @ rhs_full)
            x += T @ y
        return x.reshape(-1, 2)

    def _active_set(self, F, chi, tol, max_iter):
        xi = self.reactions(chi, F)
        _, faces = kernels.project_triangle(chi + xi / self.gamma[:, None])
        seen = {faces.tobytes()}
        res = np.inf
        for it in range(1, max_iter + 1):
            chi = self._solve_on_faces(faces, F)
            xi = self.reactions(chi, F)
            proj, new_faces = kernels.project_triangle(chi + xi / self.gamma[:, None])
            res = float(np.max(np.abs(chi - proj)))
            scale = 1.0 + float(np.max(np.abs(chi)))
            if np.array_equal(new_faces, faces) or res <= tol * scale:
                return chi, SolveReport(it, res, True)
            key = new_faces.tobytes()
            if key in seen:
                # cycling: hand the current iterate to projected Gauss-Seidel
                logger.info("active-set cycle after %d iterations; polishing with PGS", it)
                chi, _ = kernels.project_triangle(chi)
                chi, rep = self._pgs(F, chi, tol, int(200 * np.sqrt(self.mesh.n_nodes)))
                return chi, SolveReport(it + rep.iterations, rep.final_residual, rep.converged)
            seen.add(key)
            faces = new_faces
        return chi, SolveReport(max_iter, res, False)

    def _pgs(self, F, chi, tol, max_iter):
        chi = np.ascontiguousarray(chi, dtype=float)
        S = self.S
        scale = 1.0 + float(np.max(np.abs(chi)))
        sweeps, change = kernels.pgs_sweeps(
            S.indptr.astype(np.int64), S.indices.astype(np.int64), S.data, self.M2, F, chi, max_iter, tol * scale
        )
        return chi, SolveReport(int(sweeps), float(change), bool(change <= tol * scale))


def solve_phase_vi(
    mesh: Mesh,
    T_plus,
    beta_minus,
    params: MaterialParams,
    variant: PhaseVariant | None = None,
    tol: float = 1e-10,
    max_iter: int | None = None,
    flux=None,
    method: str = "active_set",
):
    """One-shot solve of the phase inequality at a given temperature field."""
    problem = PhaseProblem(mesh, params, beta_minus, variant, flux)
    return problem.solve(T_plus, tol=tol, max_iter=max_iter, method=method)


def check_phase_solution(chi, xi, load_scale: float, tol: float) -> None:
    """Raise :class:`SolverError` when feasibility or complementarity fails."""
    feas = feasibility_violation(chi)
    comp = complementarity_residual(chi, xi)
    if feas > 1e-12 or comp > tol * (1.0 + load_scale):
        raise SolverError(f"phase solution violates K (feasibility {feas:.2e}, complementarity {comp:.2e})")
