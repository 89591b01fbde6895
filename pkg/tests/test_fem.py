import numpy as np
import pytest
import scipy.linalg as sla

from sma_collision import fem
from sma_collision.mesh import GAMMA0, GAMMA1, BoundarySpec, BoundaryRegion, Mesh, build_structured_mesh
from sma_collision.velocity import clamped_dofs


def single_triangle():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    edges = np.array([[0, 1], [1, 2], [2, 0]])
    tags = np.array([GAMMA0, "GammaFree", "GammaFree"])
    return Mesh(nodes, np.array([[0, 1, 2]]), edges, tags, np.zeros(3, dtype=np.int64), 1.0, 1.0)


def test_unit_triangle_stiffness():
    A = fem.assemble_scalar_stiffness(single_triangle()).toarray()
    # gradients (-1,-1), (1,0), (0,1) times area 1/2
    expected = 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])
    assert np.allclose(A, expected, atol=1e-15)


def test_unit_triangle_mass():
    m = single_triangle()
    M = fem.assemble_scalar_mass(m).toarray()
    assert np.allclose(M, np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]) / 24.0, atol=1e-16)
    assert np.allclose(fem.assemble_scalar_mass(m, lumped=True).toarray(), np.eye(3) / 6.0, atol=1e-16)


@pytest.mark.parametrize("diagonal", ["right", "alternating"])
def test_scalar_matrix_properties(diagonal):
    m = build_structured_mesh(5, 3, 2.0, 1.0, diagonal=diagonal)
    A = fem.assemble_scalar_stiffness(m)
    M = fem.assemble_scalar_mass(m)
    assert abs(A - A.T).max() == 0.0
    assert abs(M - M.T).max() == 0.0
    assert np.allclose(A @ np.ones(m.n_nodes), 0.0, atol=1e-13)
    assert M.sum() == pytest.approx(2.0, rel=1e-13)
    assert np.allclose(fem.lumped_mass(m), np.asarray(M.sum(axis=1)).ravel(), rtol=1e-14)
    assert np.linalg.eigvalsh(A.toarray()).min() > -1e-12


def test_elastic_kernel():
    m = build_structured_mesh(4, 3, 1.0, 0.7, diagonal="alternating")
    A = fem.assemble_elastic_stiffness(m)
    assert abs(A - A.T).max() == 0.0
    x, y = m.nodes[:, 0], m.nodes[:, 1]
    for field in ([np.ones_like(x), 0 * x], [0 * x, np.ones_like(x)], [-y, x]):
        v = np.column_stack(field).ravel()
        assert np.abs(A @ v).max() < 1e-13


def test_korn_after_clamping():
    m = build_structured_mesh(2, 2, 1.0, 1.0)
    A = fem.assemble_elastic_stiffness(m).toarray()
    free = np.setdiff1d(np.arange(2 * m.n_nodes), clamped_dofs(m))
    assert sla.eigvalsh(A[np.ix_(free, free)]).min() > 1e-6


def test_constant_strain_energy():
    # u = (x, -y): eps = diag(1, -1), eps:eps = 2
    m = build_structured_mesh(6, 4, 1.5, 0.8, diagonal="alternating")
    u = np.column_stack([m.nodes[:, 0], -m.nodes[:, 1]]).ravel()
    A = fem.assemble_elastic_stiffness(m)
    assert u @ (A @ u) == pytest.approx(2 * 1.5 * 0.8, rel=1e-12)


def test_discrete_green_identity():
    # A x_interp = boundary flux of d(x)/dn = n_x
    m = build_structured_mesh(5, 4, 1.0, 1.0, diagonal="alternating")
    A = fem.assemble_scalar_stiffness(m)
    lhs = A @ m.nodes[:, 0]
    rhs = np.zeros(m.n_nodes)
    for (a, b) in m.boundary_edges:
        d = m.nodes[b] - m.nodes[a]
        nx = d[1] / np.hypot(*d)
        L = np.hypot(*d)
        rhs[a] += 0.5 * L * nx
        rhs[b] += 0.5 * L * nx
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_traction_load():
    m = build_structured_mesh(3, 3, 3.0, 3.0)
    assert not fem.assemble_boundary_traction(m, GAMMA1, (0.0, 0.0)).any()
    g = np.array([2.0, -5.0])
    load = fem.assemble_boundary_traction(m, GAMMA1, g).reshape(-1, 2)
    nz = np.flatnonzero(np.abs(load).sum(axis=1))
    # one tagged edge of length 1: half of g*L at each end
    assert len(nz) == 2
    assert np.allclose(load[nz], 0.5 * g)
    assert np.allclose(fem.assemble_boundary_traction(m, GAMMA1, g, scale=3.0).reshape(-1, 2).sum(axis=0), 3.0 * g)
    # callable form integrates a linear g exactly
    lin = fem.assemble_boundary_traction(m, GAMMA1, lambda x, y: (x, 0 * x)).reshape(-1, 2)
    assert lin[:, 0].sum() == pytest.approx(1.5)


def test_traction_adjacent_edges_share_node():
    spec = BoundarySpec(gamma1=BoundaryRegion("top", 0.0, 2.0 / 3.0))
    m = build_structured_mesh(3, 3, 3.0, 3.0, spec)
    load = fem.assemble_boundary_traction(m, GAMMA1, (1.0, 0.0)).reshape(-1, 2)
    shared = np.flatnonzero(np.isclose(m.nodes[:, 0], 1.0) & np.isclose(m.nodes[:, 1], 3.0))[0]
    assert load[shared, 0] == pytest.approx(1.0)
    assert load[:, 0].sum() == pytest.approx(2.0)


def test_load_quadrature_exact_for_polynomials():
    m = build_structured_mesh(3, 2, 1.0, 1.0)
    b = fem.assemble_load(m, lambda x, y: x * x * y)
    # sum of hat functions is 1, so the total is the integral: 1/3 * 1/2
    assert b.sum() == pytest.approx(1.0 / 6.0, rel=1e-13)
    per_tri = np.arange(m.n_triangles, dtype=float)
    assert fem.assemble_load(m, per_tri).sum() == pytest.approx(np.sum(per_tri * m.areas))


def test_l2_error_of_interpolant_is_zero_for_linear():
    m = build_structured_mesh(4, 4, 1.0, 1.0)
    f = lambda x, y: 2 * x - 3 * y + 1
    assert fem.l2_error(m, f(m.nodes[:, 0], m.nodes[:, 1]), f) < 1e-14


def test_no_tiny_entries():
    m = build_structured_mesh(4, 4, 1.0, 1.0)
    A = fem.assemble_scalar_stiffness(m)
    assert np.all(np.abs(A.data) >= 1e-300)
