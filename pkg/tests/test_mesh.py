import numpy as np
import pytest

from sma_collision.errors import AssemblyError
from sma_collision.mesh import (
    GAMMA0,
    GAMMA1,
    GAMMA_FREE,
    BoundaryRegion,
    BoundarySpec,
    Mesh,
    boundary_edges_with_tag,
    build_structured_mesh,
)


def test_smallest_grid():
    m = build_structured_mesh(1, 1, 1e-3, 1e-3)
    assert (m.n_nodes, m.n_triangles, len(m.boundary_edges)) == (4, 2, 4)
    bottom = boundary_edges_with_tag(m, GAMMA0).edges
    assert len(bottom) == 1
    assert np.all(m.nodes[bottom.ravel(), 1] == 0.0)


def test_two_by_two_counts():
    m = build_structured_mesh(2, 2, 1e-3, 1e-3)
    assert (m.n_nodes, m.n_triangles, len(m.boundary_edges)) == (9, 8, 8)


def test_top_third_selects_middle_edge():
    m = build_structured_mesh(3, 3, 1e-3, 1e-3)
    e = boundary_edges_with_tag(m, GAMMA1).edges
    assert len(e) == 1
    xs = sorted(m.nodes[e[0], 0])
    assert xs == pytest.approx([1e-3 / 3, 2e-3 / 3], abs=1e-15)


@pytest.mark.parametrize("tag,normal", [(GAMMA0, (0.0, -1.0)), (GAMMA1, (0.0, 1.0))])
def test_normals(tag, normal):
    m = build_structured_mesh(6, 6, 1.0, 1.0)
    normals = boundary_edges_with_tag(m, tag).normals
    assert len(normals) > 0
    assert np.array_equal(normals, np.tile(normal, (len(normals), 1)))


def test_empty_gamma1():
    m = build_structured_mesh(4, 4, 1.0, 1.0, BoundarySpec(gamma1=None))
    assert len(boundary_edges_with_tag(m, GAMMA1).edges) == 0


@pytest.mark.parametrize("diagonal", ["right", "left", "alternating"])
def test_invariants(diagonal):
    W, H = 2e-3, 1.5e-3
    m = build_structured_mesh(7, 5, W, H, diagonal=diagonal)
    assert np.all(m.areas > 0)
    assert abs(m.areas.sum() - W * H) <= 1e-12 * W * H
    total = sum(boundary_edges_with_tag(m, t).lengths.sum() for t in (GAMMA0, GAMMA1, GAMMA_FREE))
    assert abs(total - 2 * (W + H)) <= 1e-12 * 2 * (W + H)
    assert set(m.boundary_tags) <= {GAMMA0, GAMMA1, GAMMA_FREE}
    tol = 1e-12 * max(W, H)
    assert np.all((m.nodes >= -tol) & (m.nodes <= np.array([W, H]) + tol))
    # each boundary edge sits in exactly one triangle, and its normal points away from it
    tri_edges = np.sort(np.vstack([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]]), axis=1)
    keys, counts = np.unique(tri_edges, axis=0, return_counts=True)
    lookup = {tuple(k): c for k, c in zip(keys, counts)}
    for (a, b), owner in zip(m.boundary_edges, m.edge_owner):
        assert lookup[tuple(sorted((a, b)))] == 1
        centroid = m.nodes[m.triangles[owner]].mean(axis=0)
        mid = 0.5 * (m.nodes[a] + m.nodes[b])
        d = m.nodes[b] - m.nodes[a]
        n = np.array([d[1], -d[0]])
        assert n @ (mid - centroid) > 0


def test_refinement_nesting():
    coarse = build_structured_mesh(3, 4, 1e-3, 2e-3)
    fine = build_structured_mesh(6, 8, 1e-3, 2e-3)
    fine_set = {tuple(p) for p in fine.nodes}
    assert all(tuple(p) in fine_set for p in coarse.nodes)


@pytest.mark.parametrize("args", [(0, 1, 1.0, 1.0), (1, 1, 0.0, 1.0), (1, 1, 1.0, -1.0), (1.5, 1, 1.0, 1.0)])
def test_invalid_arguments(args):
    with pytest.raises(ValueError):
        build_structured_mesh(*args)


def test_spec_validation():
    with pytest.raises(ValueError):
        BoundarySpec(gamma0=BoundaryRegion("bottom", 0.5, 0.5))
    with pytest.raises(ValueError):
        BoundarySpec(gamma0=BoundaryRegion("top", 0.0, 1.0))
    with pytest.raises(ValueError):
        BoundaryRegion("front")


def test_degenerate_triangle_reported():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(AssemblyError, match="triangle 0"):
        Mesh(nodes, np.array([[0, 1, 2]]), np.zeros((0, 2), int), np.array([], str), np.zeros(0, int), 2.0, 1.0)


def test_mesh_is_read_only():
    m = build_structured_mesh(2, 2, 1.0, 1.0)
    with pytest.raises(ValueError):
        m.nodes[0, 0] = 5.0
