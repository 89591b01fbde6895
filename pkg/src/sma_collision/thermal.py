"""Temperature after the collision.

The energy balance ``C [T] + l_a [beta3] - lam Lap(Tbar) = diss`` with the
mean temperature ``Tbar = (T+ + T-)/2`` is linear in ``T+``.  Discretised with
P1 elements and lumped mass it reads

    (C M_L + lam/2 A + h/2 M_G) T+ = C M_L T- - lam/2 A T- - h/2 M_G T-
                                     + h M_G T_ext + int diss v
                                     - l_a M_L (beta3+ - beta3-) + extra

where the ``h`` terms appear only for the Robin (exchange) condition
``lam dTbar/dn + h (Tbar - T_ext) = 0`` and ``M_G`` is the boundary mass.
Testing with the constant field cancels the stiffness exactly, so the global
energy balance holds to round-off in the adiabatic case.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fem
from .linalg import DirectSolver
from .mesh import Mesh
from .params import MaterialParams
from .velocity import DissipationField

logger = logging.getLogger(__name__)

ADIABATIC = "Adiabatic"
ROBIN = "Robin"


@dataclass(frozen=True)
class ThermalBC:
    """Adiabatic boundary, or heat exchange with coefficient ``h_coeff`` [J/(K m^2)]."""

    kind: str = ADIABATIC
    h_coeff: float = 0.0
    T_ext: float = 0.0

    def __post_init__(self):
        if self.kind not in (ADIABATIC, ROBIN):
            raise ValueError(f"unknown thermal boundary condition {self.kind!r}")
        if self.kind == ROBIN and not (self.h_coeff >= 0.0 and self.T_ext > 0.0):
            raise ValueError("Robin condition needs h_coeff >= 0 and T_ext > 0")


class ThermalProblem:
    """Assembled and factorized thermal operator, reusable across right-hand sides."""

    def __init__(self, mesh: Mesh, params: MaterialParams, bc: ThermalBC | None = None):
        bc = bc if bc is not None else ThermalBC()
        if params.C == 0.0 and params.lam == 0.0 and bc.kind == ADIABATIC:
            raise ValueError("C = 0 and lam = 0 with an adiabatic boundary: singular thermal system")
        self.mesh = mesh
        self.params = params
        self.bc = bc
        self.ml = fem.lumped_mass(mesh)
        self.A = fem.assemble_scalar_stiffness(mesh)
        lhs = sp.diags(params.C * self.ml) + 0.5 * params.lam * self.A
        self.MG = None
        if bc.kind == ROBIN and bc.h_coeff > 0.0:
            self.MG = fem.assemble_boundary_mass(mesh)
            lhs = lhs + 0.5 * bc.h_coeff * self.MG
        self.lhs = sp.csr_matrix(lhs)
        self._solver = DirectSolver(self.lhs)

    def rhs(self, T_minus, beta3_plus, beta3_minus, diss: DissipationField | None, extra=None):
        p = self.params
        T_minus = np.broadcast_to(np.asarray(T_minus, dtype=float), (self.mesh.n_nodes,))
        jump = np.asarray(beta3_plus, dtype=float) - np.asarray(beta3_minus, dtype=float)
        b = p.C * self.ml * T_minus - 0.5 * p.lam * (self.A @ T_minus) - p.l_a * self.ml * jump
        if diss is not None:
            b = b + fem.assemble_load(self.mesh, diss.per_triangle)
        if self.MG is not None:
            h = self.bc.h_coeff
            b = b - 0.5 * h * (self.MG @ T_minus) + h * (self.MG @ np.full(self.mesh.n_nodes, self.bc.T_ext))
        if extra is not None:
            b = b + extra
        return b

    def solve(self, T_minus, beta3_plus, beta3_minus, diss=None, extra=None) -> np.ndarray:
        T = self._solver.solve(self.rhs(T_minus, beta3_plus, beta3_minus, diss, extra))
        if np.any(T <= 0.0):
            logger.warning("nonpositive absolute temperature in the solution (min %.3g K)", T.min())
        return T


def solve_thermal(
    mesh: Mesh,
    T_minus,
    beta3_plus,
    beta3_minus,
    diss: DissipationField | None,
    params: MaterialParams,
    bc: ThermalBC | None = None,
    extra=None,
) -> np.ndarray:
    """Nodal ``T+``.  ``extra`` is an optional assembled heat load vector."""
    T_minus = np.broadcast_to(np.asarray(T_minus, dtype=float), (mesh.n_nodes,))
    if np.any(T_minus <= 0.0):
        raise ValueError("T_minus must be positive")
    return ThermalProblem(mesh, params, bc).solve(T_minus, beta3_plus, beta3_minus, diss, extra)


def energy_balance_defect(mesh: Mesh, params: MaterialParams, T_plus, T_minus, beta3_plus, beta3_minus, diss):
    """``(int C [T] + int l_a [beta3] - int diss) / int diss`` (absolute when no work)."""
    ml = fem.lumped_mass(mesh)
    lhs = params.C * ml @ (np.asarray(T_plus) - np.asarray(T_minus)) + params.l_a * ml @ (
        np.asarray(beta3_plus) - np.asarray(beta3_minus)
    )
    total = diss.total(mesh) if diss is not None else 0.0
    return (lhs - total) / total if total > 0.0 else lhs
