"""Full collision solve.

The velocity does not depend on temperature or phases, so it is computed
once together with the dissipated work.  Temperature and phases are then
coupled by the fixed point ``chi -> T = thermal(chi) -> chi = phase(T)``,
started from ``beta-`` (or a supplied guess for ``beta3``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import fem
from .errors import SolverError
from .linalg import DEFAULT_TOL, SolveReport
from .mesh import GAMMA1, Mesh, boundary_edges_with_tag
from .params import MaterialParams, PhaseVariant, PreState, check_beta
from .phase import PhaseProblem, ReactionPair, feasibility_violation
from .thermal import ThermalBC, ThermalProblem
from .velocity import DissipationField, PercussionLoad, dissipated_work, solve_velocity_with_report

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedPointConfig:
    tol: float = 1e-8
    max_iter: int = 200
    relaxation: float = 1.0

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("fixed-point tol must be positive")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class Diagnostics:
    iterations: int = 0
    converged: bool = False
    relaxation: float = 1.0
    update_T: list = field(default_factory=list)
    update_beta: list = field(default_factory=list)
    velocity: SolveReport | None = None
    phase: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {
            "fixed_point_iterations": self.iterations,
            "converged": self.converged,
            "relaxation": self.relaxation,
            "update_norms_T": [float(v) for v in self.update_T],
            "update_norms_beta": [float(v) for v in self.update_beta],
            "final_update_T": float(self.update_T[-1]) if self.update_T else 0.0,
            "final_update_beta": float(self.update_beta[-1]) if self.update_beta else 0.0,
            "phase_iterations": [r.iterations for r in self.phase],
            "phase_residuals": [float(r.final_residual) for r in self.phase],
        }
        if self.velocity is not None:
            out["velocity_iterations"] = self.velocity.iterations
            out["velocity_residual"] = float(self.velocity.final_residual)
        return out


@dataclass(frozen=True)
class CollisionResult:
    U_plus: np.ndarray
    T_plus: np.ndarray
    beta_plus: np.ndarray
    reactions: ReactionPair
    diss: DissipationField
    diagnostics: Diagnostics

    @property
    def converged(self) -> bool:
        return self.diagnostics.converged


def _initial_chi(chi_minus, beta3_guess):
    if beta3_guess is None:
        return chi_minus.copy()
    g = np.broadcast_to(np.clip(np.asarray(beta3_guess, dtype=float), 0.0, 1.0), chi_minus[:, 1].shape)
    return np.column_stack([np.minimum(chi_minus[:, 0], 1.0 - g), g])


def _prescribed_field(mesh: Mesh, diss) -> DissipationField:
    if isinstance(diss, DissipationField):
        return diss
    arr = np.asarray(diss, dtype=float)
    if arr.ndim == 0:
        return DissipationField.uniform(mesh, float(arr))
    if arr.shape != (mesh.n_triangles,) or np.any(arr < 0.0):
        raise ValueError("prescribed dissipated work must be a nonnegative scalar or per-triangle array")
    return DissipationField.from_triangles(mesh, arr)


def solve_collision(
    mesh: Mesh,
    params: MaterialParams,
    pre: PreState,
    load: PercussionLoad,
    bc: ThermalBC | None = None,
    fp: FixedPointConfig | None = None,
    variant: PhaseVariant | None = None,
    *,
    prescribed_diss=None,
    beta3_guess=None,
    heat_source=None,
    phase_flux=None,
    lin_tol: float = DEFAULT_TOL,
    vi_tol: float = 1e-10,
) -> CollisionResult:
    """Post-collision velocity, temperature and phase fractions.

    ``prescribed_diss`` (scalar, per-triangle array or DissipationField)
    bypasses the velocity solve; ``U+`` is then reported as ``U-``.
    ``heat_source`` is a nodal volumetric heat impulse [J/m^3] added to the
    energy balance and ``phase_flux`` an ``(N, 2)`` boundary datum for the
    phase equation.  Non-convergence of the fixed point is reported through
    ``result.converged``; inner solver failures raise.
    """
    fp = fp if fp is not None else FixedPointConfig()
    bc = bc if bc is not None else ThermalBC()
    n = mesh.n_nodes
    T_minus, beta_minus, U_minus = pre.on(n)
    check_beta(beta_minus)
    if np.any(T_minus <= 0.0):
        raise ValueError("T_minus must be positive")
    diag = Diagnostics(relaxation=fp.relaxation)

    if prescribed_diss is None:
        U_plus, diag.velocity = solve_velocity_with_report(mesh, params.rho, params.k_v, load, U_minus, lin_tol)
        diss = dissipated_work(mesh, U_plus, U_minus, params.k_v)
    else:
        U_plus = U_minus.copy()
        diss = _prescribed_field(mesh, prescribed_diss)

    extra = None
    if heat_source is not None:
        f = np.broadcast_to(np.asarray(heat_source, dtype=float), (n,))
        extra = fem.assemble_scalar_mass(mesh) @ f

    thermal = ThermalProblem(mesh, params, bc)
    phase = PhaseProblem(mesh, params, beta_minus, variant, phase_flux)
    b3m = beta_minus[:, 2]

    chi = _initial_chi(phase.chi_minus, beta3_guess)
    omega = fp.relaxation
    T_prev = None
    rises = 0
    last = np.inf
    chi_out = chi
    for it in range(1, fp.max_iter + 1):
        T = thermal.solve(T_minus, chi[:, 1], b3m, diss, extra)
        pair, _, rep = phase.solve(T, chi0=chi, tol=vi_tol)
        diag.phase.append(rep)
        if not rep.converged:
            logger.warning("phase solve did not converge at outer iteration %d", it)
        chi_out = pair.stacked
        step = chi_out - chi
        d_beta = float(max(np.max(np.abs(step)), np.max(np.abs(step.sum(axis=1)))))
        # the first thermal solve is compared with T-
        ref = T_minus if T_prev is None else T_prev
        d_T = float(np.max(np.abs(T - ref) / (1.0 + np.abs(T))))
        diag.update_T.append(d_T)
        diag.update_beta.append(d_beta)
        diag.iterations = it
        logger.debug("fixed point %d: dT %.3e dbeta %.3e omega %.3g", it, d_T, d_beta, omega)
        if d_T <= fp.tol and d_beta <= fp.tol:
            diag.converged = True
            break
        norm = max(d_T, d_beta)
        rises = rises + 1 if norm > last else 0
        last = norm
        if rises >= 2:
            omega *= 0.5
            rises = 0
            logger.info("fixed-point oscillation; relaxation lowered to %.3g", omega)
        # a convex combination of points of K stays in K
        chi = chi + omega * step
        T_prev = T
    diag.relaxation = omega
    if not diag.converged:
        logger.warning("fixed point not converged after %d iterations", fp.max_iter)

    T_plus = thermal.solve(T_minus, chi_out[:, 1], b3m, diss, extra)
    F = phase.load(T_plus)
    xi = phase.reactions(chi_out, F)
    beta_plus = np.column_stack([1.0 - chi_out[:, 0] - chi_out[:, 1], chi_out[:, 0], chi_out[:, 1]])
    if feasibility_violation(chi_out) > 1e-12:
        logger.warning("returned phase fractions leave K by %.3g", feasibility_violation(chi_out))
    return CollisionResult(
        U_plus=np.asarray(U_plus),
        T_plus=T_plus,
        beta_plus=beta_plus,
        reactions=ReactionPair(xi[:, 0].copy(), xi[:, 1].copy()),
        diss=diss,
        diagnostics=diag,
    )


@dataclass(frozen=True)
class ProbeData:
    """Data of one stability run: percussion ``g``, heat source ``f`` (nodal), phase flux ``h`` (N, 2)."""

    load: PercussionLoad
    f: object = 0.0
    h: object = None


def h1_norm(mesh: Mesh, v, A=None, M=None) -> float:
    """Discrete ``H^1`` norm ``sqrt(v'(A + M)v)`` of a nodal P1 field."""
    A = fem.assemble_scalar_stiffness(mesh) if A is None else A
    M = fem.assemble_scalar_mass(mesh) if M is None else M
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(max(v @ (A @ v) + v @ (M @ v), 0.0)))


def stability_probe(
    mesh: Mesh,
    params: MaterialParams,
    pre: PreState,
    first: ProbeData,
    second: ProbeData,
    bc: ThermalBC | None = None,
    fp: FixedPointConfig | None = None,
    variant: PhaseVariant | None = None,
) -> float:
    """Ratio of the solution difference to the data difference.

    Numerator: ``|T1 - T2|_V + sum_i |chi_i1 - chi_i2|_V`` with the H^1
    norm.  Denominator: ``|g1 - g2|`` in L^2 of the loaded segment, plus the
    L^2 boundary norms of the phase fluxes and the L^2 norm of the heat
    sources.
    """
    n = mesh.n_nodes
    M = fem.assemble_scalar_mass(mesh)
    MG = fem.assemble_boundary_mass(mesh)

    def nodal(x):
        return np.broadcast_to(np.asarray(x if x is not None else 0.0, dtype=float), (n,))

    def flux(h):
        return np.zeros((n, 2)) if h is None else np.broadcast_to(np.asarray(h, dtype=float), (n, 2))

    loads = [d.load for d in (first, second)]
    seg = boundary_edges_with_tag(mesh, GAMMA1).lengths.sum()
    dg = float(np.linalg.norm(loads[0].traction - loads[1].traction)) * np.sqrt(seg)
    if any(ld.region != GAMMA1 for ld in loads):
        raise ValueError("stability probe expects percussions on Gamma1")
    df = nodal(first.f) - nodal(second.f)
    dh = flux(first.h) - flux(second.h)
    denom = dg + float(np.sqrt(max(df @ (M @ df), 0.0)))
    denom += sum(float(np.sqrt(max(dh[:, k] @ (MG @ dh[:, k]), 0.0))) for k in range(2))
    if denom == 0.0:
        raise ValueError("stability probe needs different data sets (zero denominator)")

    results = []
    for d in (first, second):
        h = None if d.h is None else flux(d.h)
        res = solve_collision(mesh, params, pre, d.load, bc, fp, variant, heat_source=nodal(d.f), phase_flux=h)
        if not res.converged:
            raise SolverError("stability probe run did not converge")
        results.append(res)
    A = fem.assemble_scalar_stiffness(mesh)
    a, b = results
    num = h1_norm(mesh, a.T_plus - b.T_plus, A, M)
    num += sum(h1_norm(mesh, a.beta_plus[:, k] - b.beta_plus[:, k], A, M) for k in (1, 2))
    return num / denom
