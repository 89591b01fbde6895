import math

import numpy as np
import pytest

from sma_collision import fem
from sma_collision.errors import SolverError
from sma_collision.mesh import GAMMA0, BoundaryRegion, BoundarySpec, build_structured_mesh
from sma_collision.velocity import (
    DissipationField,
    PercussionLoad,
    dissipated_work,
    solve_velocity,
    solve_velocity_system,
    solve_velocity_with_report,
    velocity_operator,
)

RHO, KV = 6500.0, 1e6


@pytest.fixture(scope="module")
def mesh():
    # even alternating grid: mirror image of itself about x = W/2
    return build_structured_mesh(12, 12, 1e-3, 1e-3, diagonal="alternating")


def test_traction_direction():
    assert np.allclose(PercussionLoad(2.0).traction, [0.0, -2.0], atol=1e-15)
    assert np.allclose(PercussionLoad.from_degrees(2.0, 60).traction, [1.0, -math.sqrt(3)])
    with pytest.raises(ValueError):
        PercussionLoad(-1.0)


def test_zero_load(mesh):
    U = solve_velocity(mesh, RHO, KV, PercussionLoad(0.0))
    assert not U.any()


def test_clamped_and_mirror_symmetry(mesh):
    U = solve_velocity(mesh, RHO, KV, PercussionLoad(2e7))
    assert np.all(U[mesh.tag_nodes(GAMMA0)] == 0.0)
    n = 13
    idx = np.arange(mesh.n_nodes).reshape(n, n)
    mirror = idx[:, ::-1].ravel()
    scale = np.abs(U).max()
    assert np.abs(U[:, 0] + U[mirror, 0]).max() <= 1e-8 * scale
    assert np.abs(U[:, 1] - U[mirror, 1]).max() <= 1e-8 * scale


def test_weak_form_residual(mesh):
    load = PercussionLoad.from_degrees(2e7, 60)
    U, rep = solve_velocity_with_report(mesh, RHO, KV, load)
    assert rep.converged
    K = velocity_operator(mesh, RHO, KV)
    r = fem.assemble_boundary_traction(mesh, load.region, load.traction) - K @ U.ravel()
    free = np.ones(2 * mesh.n_nodes, bool)
    g0 = mesh.tag_nodes(GAMMA0)
    free[2 * g0] = free[2 * g0 + 1] = False
    # interior rows balance; the clamped rows carry the support reaction
    assert np.abs(r[free]).max() <= 1e-8 * np.abs(K @ U.ravel()).max()
    total = r[~free].reshape(-1, 2).sum(axis=0)
    resultant = load.traction * mesh.width / 3 - RHO * (fem.assemble_vector_mass(mesh) @ U.ravel()).reshape(-1, 2).sum(axis=0)
    assert np.allclose(-total, -resultant, rtol=1e-6)


def test_linearity_and_quadratic_dissipation(mesh):
    a = PercussionLoad.from_degrees(1e7, 60)
    b = PercussionLoad.from_degrees(2e7, 60)
    Ua = solve_velocity(mesh, RHO, KV, a)
    Ub = solve_velocity(mesh, RHO, KV, b)
    assert np.abs(Ub - 2 * Ua).max() <= 1e-9 * np.abs(Ub).max()
    Da = dissipated_work(mesh, Ua, 0 * Ua, KV).per_triangle
    Db = dissipated_work(mesh, Ub, 0 * Ub, KV).per_triangle
    assert np.abs(Db - 4 * Da).max() <= 1e-9 * Db.max()
    assert Da.min() >= 0.0


def test_dissipation_trivial_fields():
    m = build_structured_mesh(3, 3, 1.0, 1.0)
    zero = np.zeros((m.n_nodes, 2))
    assert not dissipated_work(m, zero, zero, KV).per_triangle.any()
    shift = np.tile([3.0, -1.0], (m.n_nodes, 1))
    assert np.abs(dissipated_work(m, shift, zero, KV).per_triangle).max() < 1e-9


def test_dissipation_constant_strain():
    # U+ = s (x, -y): D = diag(s, -s), 2 k_v |D/2|^2 = k_v s^2
    s = 3.0
    m = build_structured_mesh(4, 5, 1.0, 1.0, diagonal="alternating")
    U = s * np.column_stack([m.nodes[:, 0], -m.nodes[:, 1]])
    d = dissipated_work(m, U, np.zeros_like(U), KV)
    assert np.allclose(d.per_triangle, KV * s * s, rtol=1e-12)
    assert np.allclose(d.nodal, KV * s * s, rtol=1e-12)
    assert d.total(m) == pytest.approx(KV * s * s, rel=1e-12)


def test_u_minus_enters_rhs():
    # no percussion, only a velocity before: (rho M + k_v A) U+ = (rho M - k_v A) U-
    m = build_structured_mesh(4, 4, 1e-3, 1e-3)
    Um = np.tile([0.1, 0.0], (m.n_nodes, 1))
    Um[m.tag_nodes(GAMMA0)] = 0.0
    U = solve_velocity(m, RHO, KV, PercussionLoad(0.0), U_minus=Um)
    M, A = fem.assemble_vector_mass(m), fem.assemble_elastic_stiffness(m)
    r = (RHO * M + KV * A) @ U.ravel() - (RHO * M - KV * A) @ Um.ravel()
    free = np.setdiff1d(np.arange(2 * m.n_nodes), np.concatenate([2 * m.tag_nodes(GAMMA0), 2 * m.tag_nodes(GAMMA0) + 1]))
    assert np.abs(U).max() > 0.0
    assert np.abs(r[free]).max() <= 1e-8 * np.abs(KV * A @ Um.ravel()).max()


def test_singular_without_support():
    spec = BoundarySpec(gamma0=BoundaryRegion("bottom", 0.0, 1.0))
    m = build_structured_mesh(2, 2, 1.0, 1.0, spec)
    with pytest.raises(SolverError):
        solve_velocity_system(m, 0.0, 1.0, np.ones(2 * m.n_nodes), dirichlet={})


def test_uniform_dissipation_field():
    m = build_structured_mesh(2, 2, 1.0, 1.0)
    d = DissipationField.uniform(m, 5.0)
    assert d.total(m) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        DissipationField.uniform(m, -1.0)
