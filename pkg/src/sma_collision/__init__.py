"""Post-collision state of a shape-memory-alloy solid struck by a surface percussion.

Velocity, austenite/martensite volume fractions and temperature right
after an instantaneous collision, computed with P1 finite elements on a
rectangle, plus the exact homogeneous solution used to verify them.
"""

import logging

from .closedform import ClosedFormInput, ClosedFormSolution, Regime, brute_force_0d, solve_0d, sweep_0d
from .config import RunConfig, dump_config, load_config
from .coupling import CollisionResult, FixedPointConfig, ProbeData, solve_collision, stability_probe
from .errors import AssemblyError, ConfigError, SolverError
from .kernels import BACKEND as KERNEL_BACKEND
from .linalg import SolveReport, apply_dirichlet, solve_spd
from .mesh import BoundaryRegion, BoundarySpec, Mesh, boundary_edges_with_tag, build_structured_mesh
from .output import write_diagnostics, write_fields_csv, write_vtk
from .params import MaterialParams, PhaseVariant, PreState
from .phase import PhasePair, ReactionPair, project_onto_K, solve_phase_vi
from .thermal import ThermalBC, solve_thermal
from .velocity import DissipationField, PercussionLoad, dissipated_work, solve_velocity

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"

__all__ = [
    "AssemblyError",
    "BoundaryRegion",
    "BoundarySpec",
    "ClosedFormInput",
    "ClosedFormSolution",
    "CollisionResult",
    "ConfigError",
    "DissipationField",
    "FixedPointConfig",
    "KERNEL_BACKEND",
    "MaterialParams",
    "Mesh",
    "PercussionLoad",
    "PhasePair",
    "PhaseVariant",
    "PreState",
    "ProbeData",
    "ReactionPair",
    "Regime",
    "RunConfig",
    "SolveReport",
    "SolverError",
    "ThermalBC",
    "apply_dirichlet",
    "boundary_edges_with_tag",
    "brute_force_0d",
    "build_structured_mesh",
    "dissipated_work",
    "dump_config",
    "load_config",
    "project_onto_K",
    "solve_0d",
    "solve_collision",
    "solve_phase_vi",
    "solve_spd",
    "solve_thermal",
    "solve_velocity",
    "stability_probe",
    "sweep_0d",
    "write_diagnostics",
    "write_fields_csv",
    "write_vtk",
]
