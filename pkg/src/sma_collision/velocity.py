"""Macroscopic velocity after the percussion and the work it dissipates.

The velocity jump solves, for test fields vanishing on Gamma0,

    rho int (U+ - U-) . v + k_v int D(U+ + U-) : D(v) = int_{Gamma1} G . v

with ``U+ = 0`` on Gamma0.  For a solid at rest before the stroke this is
the usual ``rho U+ - k_v div D(U+) = 0`` with traction ``k_v D(U+) N = G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fem
from .errors import SolverError
from .linalg import DEFAULT_TOL, SolveReport, apply_dirichlet, solve_spd
from .mesh import GAMMA0, GAMMA1, Mesh


@dataclass(frozen=True)
class PercussionLoad:
    """Surface percussion of ``magnitude`` [Pa s] on the boundary ``region``.

    ``angle`` is measured from the +x axis; the stroke pushes into the top
    face, so the traction is ``magnitude * (cos(angle), -sin(angle))``.
    """

    magnitude: float
    angle: float = math.pi / 2
    region: str = GAMMA1

    def __post_init__(self):
        if not self.magnitude >= 0.0:
            raise ValueError(f"percussion magnitude must be nonnegative, got {self.magnitude!r}")

    @property
    def traction(self) -> np.ndarray:
        return self.magnitude * np.array([math.cos(self.angle), -math.sin(self.angle)])

    @classmethod
    def from_degrees(cls, magnitude, angle_deg, region=GAMMA1):
        return cls(magnitude, math.radians(angle_deg), region)


@dataclass(frozen=True)
class DissipationField:
    """Dissipated work per triangle [J/m^3] and its lumped L2 projection to nodes."""

    per_triangle: np.ndarray
    nodal: np.ndarray

    def total(self, mesh: Mesh) -> float:
        return float(np.sum(self.per_triangle * mesh.areas))

    @classmethod
    def uniform(cls, mesh: Mesh, value: float) -> "DissipationField":
        if not value >= 0.0:
            raise ValueError("dissipated work must be nonnegative")
        return cls(np.full(mesh.n_triangles, float(value)), np.full(mesh.n_nodes, float(value)))

    @classmethod
    def from_triangles(cls, mesh: Mesh, values) -> "DissipationField":
        values = np.asarray(values, dtype=float)
        weights = fem.lumped_mass(mesh)
        nodal = fem.assemble_load(mesh, values) / weights
        return cls(values, nodal)


def velocity_operator(mesh: Mesh, rho: float, k_v: float) -> sp.csr_matrix:
    return (rho * fem.assemble_vector_mass(mesh) + k_v * fem.assemble_elastic_stiffness(mesh)).tocsr()


def clamped_dofs(mesh: Mesh) -> np.ndarray:
    nodes = mesh.tag_nodes(GAMMA0)
    return np.sort(np.concatenate([2 * nodes, 2 * nodes + 1]))


def solve_velocity_system(
    mesh: Mesh,
    rho: float,
    k_v: float,
    rhs: np.ndarray,
    dirichlet: dict | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
):
    """Solve ``(rho M + k_v A) U = rhs`` with prescribed dofs; returns ``(U (N,2), report)``."""
    if dirichlet is None:
        dirichlet = {int(d): 0.0 for d in clamped_dofs(mesh)}
    if not dirichlet and rho <= 0.0:
        raise SolverError("no clamped boundary and no inertia: the velocity system is singular")
    K = velocity_operator(mesh, rho, k_v)
    K2, b2 = apply_dirichlet(K, rhs, dirichlet)
    x, report = solve_spd(K2, b2, tol=tol, max_iter=max_iter)
    if not report.converged:
        raise SolverError(
            f"velocity solve did not converge: residual {report.final_residual:.3e} "
            f"after {report.iterations} iterations"
        )
    return x.reshape(-1, 2), report


def solve_velocity(
    mesh: Mesh,
    rho: float,
    k_v: float,
    load: PercussionLoad,
    U_minus=None,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Post-collision velocity ``U+`` as an ``(N, 2)`` array; zero on Gamma0."""
    U, _ = solve_velocity_with_report(mesh, rho, k_v, load, U_minus, tol)
    return U


def solve_velocity_with_report(mesh, rho, k_v, load, U_minus=None, tol=DEFAULT_TOL):
    if len(mesh.tag_nodes(GAMMA0)) == 0 and rho <= 0.0:
        raise SolverError("Gamma0 is empty and rho is zero: singular velocity system")
    rhs = fem.assemble_boundary_traction(mesh, load.region, load.traction)
    if U_minus is not None:
        Um = np.asarray(U_minus, dtype=float).reshape(-1)
        if np.any(Um):
            rhs = (
                rhs
                + rho * (fem.assemble_vector_mass(mesh) @ Um)
                - k_v * (fem.assemble_elastic_stiffness(mesh) @ Um)
            )
    if not np.any(rhs):
        return np.zeros((mesh.n_nodes, 2)), SolveReport(0, 0.0, True)
    return solve_velocity_system(mesh, rho, k_v, rhs, tol=tol)


def strain_rates(mesh: Mesh, U) -> np.ndarray:
    """``(e11, e22, sqrt2*e12)`` of the symmetric gradient per triangle."""
    U = np.asarray(U, dtype=float)
    B = fem.strain_operator(mesh)
    local = U[mesh.triangles].reshape(mesh.n_triangles, 6)
    return np.einsum("tkd,td->tk", B, local)


def dissipated_work(mesh: Mesh, U_plus, U_minus, k_v: float) -> DissipationField:
    """``2 k_v |D((U+ + U-)/2)|^2`` per triangle, plus its nodal projection."""
    mean = 0.5 * (np.asarray(U_plus, dtype=float) + np.asarray(U_minus, dtype=float))
    e = strain_rates(mesh, mean)
    per_tri = 2.0 * k_v * np.sum(e * e, axis=1)
    return DissipationField.from_triangles(mesh, per_tri)
