"""Manufactured-solution convergence studies for the velocity and thermal solves.

Both run on the unit square with unit coefficients.  The velocity field

    Ux = sin(pi x) sin(pi y / 2),   Uy = cos(pi x) (1 - cos(pi y / 2))

vanishes on the clamped bottom face; its body load and the traction on the
rest of the boundary are supplied.  The temperature

    T = 1 + cos(pi x) cos(pi y) / 2

has zero normal derivative on the square, matching the adiabatic boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fem
from .mesh import GAMMA0, Mesh, build_structured_mesh
from .params import MaterialParams
from .thermal import ThermalProblem
from .velocity import solve_velocity_system

PI = math.pi


def exact_velocity(x, y):
    return np.sin(PI * x) * np.sin(PI * y / 2), np.cos(PI * x) * (1.0 - np.cos(PI * y / 2))


def _velocity_strain(x, y):
    s, c = np.sin(PI * x), np.cos(PI * x)
    t, q = np.sin(PI * y / 2), np.cos(PI * y / 2)
    d11 = PI * c * t
    d22 = 0.5 * PI * c * t
    d12 = 0.5 * (0.5 * PI * s * q - PI * s * (1.0 - q))
    return d11, d22, d12


def _velocity_body_load(rho, k_v):
    def f(x, y):
        s, c = np.sin(PI * x), np.cos(PI * x)
        t, q = np.sin(PI * y / 2), np.cos(PI * y / 2)
        ux, uy = exact_velocity(x, y)
        div_x = -(11.0 * PI**2 / 8.0) * s * t
        div_y = 0.5 * PI**2 * c * (2.0 * q - 1.0)
        return rho * ux - k_v * div_x, rho * uy - k_v * div_y

    return f


def _traction_load(mesh: Mesh, k_v: float) -> np.ndarray:
    """``int k_v D(U) N . v`` on every boundary edge off the support (3-point Gauss)."""
    mask = mesh.boundary_tags != GAMMA0
    edges = mesh.boundary_edges[mask]
    p0, p1 = mesh.nodes[edges[:, 0]], mesh.nodes[edges[:, 1]]
    d = p1 - p0
    lengths = np.hypot(d[:, 0], d[:, 1])
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    load = np.zeros(2 * mesh.n_nodes)
    for t, w in zip(fem._EDGE_GAUSS_T, fem._EDGE_GAUSS_W):
        x = (1.0 - t) * p0 + t * p1
        d11, d22, d12 = _velocity_strain(x[:, 0], x[:, 1])
        g = k_v * np.column_stack(
            [d11 * normals[:, 0] + d12 * normals[:, 1], d12 * normals[:, 0] + d22 * normals[:, 1]]
        )
        for comp in range(2):
            wl = w * lengths * g[:, comp]
            load += np.bincount(2 * edges[:, 0] + comp, weights=(1.0 - t) * wl, minlength=load.size)
            load += np.bincount(2 * edges[:, 1] + comp, weights=t * wl, minlength=load.size)
    return load


def velocity_error(n: int, rho: float = 1.0, k_v: float = 1.0) -> float:
    mesh = build_structured_mesh(n, n, 1.0, 1.0)
    rhs = fem.assemble_vector_load(mesh, _velocity_body_load(rho, k_v)) + _traction_load(mesh, k_v)
    U, _ = solve_velocity_system(mesh, rho, k_v, rhs, tol=1e-11)
    return fem.l2_error(mesh, U, exact_velocity)


def exact_temperature(x, y):
    return 1.0 + 0.5 * np.cos(PI * x) * np.cos(PI * y)


def thermal_error(n: int, C: float = 1.0, lam: float = 1.0) -> float:
    mesh = build_structured_mesh(n, n, 1.0, 1.0)
    params = MaterialParams(rho=1.0, k_v=1.0, c=1.0, upsilon=0.0, kappa=0.0, lam=lam, C=C, l_a=1.0, T0=1.0)
    # C (T - 1) - lam/2 Lap T = src  with  T - 1 = cos cos / 2
    src = fem.assemble_load(mesh, lambda x, y: (C + lam * PI**2) * 0.5 * np.cos(PI * x) * np.cos(PI * y))
    zeros = np.zeros(mesh.n_nodes)
    T = ThermalProblem(mesh, params).solve(np.ones(mesh.n_nodes), zeros, zeros, None, src)
    return fem.l2_error(mesh, T, exact_temperature)


@dataclass(frozen=True)
class ConvergenceStudy:
    name: str
    sizes: tuple
    errors: tuple

    @property
    def rates(self) -> tuple:
        return tuple(
            math.log(self.errors[k] / self.errors[k + 1]) / math.log(self.sizes[k + 1] / self.sizes[k])
            for k in range(len(self.sizes) - 1)
        )

    def lines(self) -> list[str]:
        out = [f"{self.name}: n, L2 error, rate"]
        for k, (n, e) in enumerate(zip(self.sizes, self.errors)):
            rate = "" if k == 0 else f"{self.rates[k - 1]:.3f}"
            out.append(f"  {n:4d}  {e:.6e}  {rate}")
        return out


def run_study(levels: int = 4, coarsest: int = 8) -> list[ConvergenceStudy]:
    """Velocity and thermal studies on ``levels`` meshes, doubling from ``coarsest``."""
    if levels < 2:
        raise ValueError("a convergence study needs at least two levels")
    sizes = tuple(coarsest * 2**k for k in range(levels))
    return [
        ConvergenceStudy("velocity", sizes, tuple(velocity_error(n) for n in sizes)),
        ConvergenceStudy("thermal", sizes, tuple(thermal_error(n) for n in sizes)),
    ]
