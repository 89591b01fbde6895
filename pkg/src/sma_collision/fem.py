"""P1 finite-element operators on triangle meshes.

All element integrals are closed form.  Global matrices are summed with
``np.bincount`` over the element contributions in triangle order, so entry
``(i, j)`` and entry ``(j, i)`` receive identical summands in identical
order and the assembled matrices are exactly symmetric and bit-reproducible.

Vector fields use node-major ordering: dof ``2*i`` is the x component of
node ``i`` and ``2*i + 1`` its y component.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import AssemblyError
from .mesh import Mesh, boundary_edges_with_tag

# three-point Gauss rule on the reference edge [0, 1]
_EDGE_GAUSS_T = 0.5 + 0.5 * np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)])
_EDGE_GAUSS_W = np.array([5.0, 8.0, 5.0]) / 18.0

# degree-4 rule on the reference triangle (barycentric coordinates, weights sum to 1)
_TRI_RULE = (
    np.array(
        [
            [0.108103018168070, 0.445948490915965, 0.445948490915965],
            [0.445948490915965, 0.108103018168070, 0.445948490915965],
            [0.445948490915965, 0.445948490915965, 0.108103018168070],
            [0.816847572980459, 0.091576213509771, 0.091576213509771],
            [0.091576213509771, 0.816847572980459, 0.091576213509771],
            [0.091576213509771, 0.091576213509771, 0.816847572980459],
        ]
    ),
    np.array([0.223381589678011] * 3 + [0.109951743655322] * 3),
)


def _assemble(rows, cols, vals, n):
    """Sum duplicate (row, col) pairs in input order and return canonical CSR."""
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    vals = np.asarray(vals, dtype=float).ravel()
    keys = rows * n + cols
    uniq, inv = np.unique(keys, return_inverse=True)
    summed = np.bincount(inv, weights=vals, minlength=len(uniq))
    r = uniq // n
    c = uniq % n
    keep = np.abs(summed) >= 1e-300
    r, c, summed = r[keep], c[keep], summed[keep]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, r + 1, 1)
    np.cumsum(indptr, out=indptr)
    return sp.csr_matrix((summed, c, indptr), shape=(n, n))


def p1_gradients(mesh: Mesh) -> np.ndarray:
    """Constant basis-function gradients, shape ``(ntri, 3, 2)``."""
    p = mesh.nodes[mesh.triangles]
    area2 = 2.0 * mesh.areas
    if np.any(~(area2 > 0.0)):
        bad = int(np.flatnonzero(~(area2 > 0.0))[0])
        raise AssemblyError(f"degenerate triangle {bad}")
    # grad phi_a = (y_b - y_c, x_c - x_b) / 2A over the cyclic triple (a, b, c)
    g = np.empty((mesh.n_triangles, 3, 2))
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        g[:, a, 0] = (p[:, b, 1] - p[:, c, 1]) / area2
        g[:, a, 1] = (p[:, c, 0] - p[:, b, 0]) / area2
    return g


def _scalar_pairs(tri):
    rows = np.repeat(tri, 3, axis=1)
    cols = np.tile(tri, (1, 3))
    return rows, cols


def assemble_scalar_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Matrix of ``(grad u, grad v)`` for P1 functions."""
    g = p1_gradients(mesh)
    A = mesh.areas
    ke = A[:, None, None] * (
        g[:, :, None, 0] * g[:, None, :, 0] + g[:, :, None, 1] * g[:, None, :, 1]
    )
    rows, cols = _scalar_pairs(mesh.triangles)
    return _assemble(rows, cols, ke.reshape(len(A), 9), mesh.n_nodes)


def assemble_scalar_mass(mesh: Mesh, lumped: bool = False) -> sp.csr_matrix:
    """Consistent ``(A/12)[[2,1,1],[1,2,1],[1,1,2]]`` or its row-sum diagonal."""
    A = mesh.areas
    if lumped:
        return sp.diags(lumped_mass(mesh), format="csr")
    local = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    me = A[:, None, None] * local[None]
    rows, cols = _scalar_pairs(mesh.triangles)
    return _assemble(rows, cols, me.reshape(len(A), 9), mesh.n_nodes)


def lumped_mass(mesh: Mesh) -> np.ndarray:
    """Diagonal of the lumped mass matrix, ``sum_t |t|/3`` per node."""
    third = np.repeat(mesh.areas / 3.0, 3)
    return np.bincount(mesh.triangles.ravel(), weights=third, minlength=mesh.n_nodes)


def strain_operator(mesh: Mesh) -> np.ndarray:
    """Per-triangle map from the six local dofs to ``(e11, e22, sqrt2*e12)``.

    Shape ``(ntri, 3, 6)``; with it ``eps:eps = |B u|^2``.
    """
    g = p1_gradients(mesh)
    B = np.zeros((mesh.n_triangles, 3, 6))
    s = np.sqrt(0.5)
    for a in range(3):
        B[:, 0, 2 * a] = g[:, a, 0]
        B[:, 1, 2 * a + 1] = g[:, a, 1]
        B[:, 2, 2 * a] = s * g[:, a, 1]
        B[:, 2, 2 * a + 1] = s * g[:, a, 0]
    return B


def vector_dofs(tri):
    d = np.empty((len(tri), 6), dtype=np.int64)
    d[:, 0::2] = 2 * tri
    d[:, 1::2] = 2 * tri + 1
    return d


def assemble_elastic_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Matrix of ``a(u, v) = int eps(u):eps(v)`` on P1 vector fields (2N x 2N)."""
    B = strain_operator(mesh)
    A = mesh.areas
    ke = A[:, None, None] * (
        B[:, 0, :, None] * B[:, 0, None, :]
        + B[:, 1, :, None] * B[:, 1, None, :]
        + B[:, 2, :, None] * B[:, 2, None, :]
    )
    dofs = vector_dofs(mesh.triangles)
    rows = np.repeat(dofs, 6, axis=1)
    cols = np.tile(dofs, (1, 6))
    return _assemble(rows, cols, ke.reshape(len(A), 36), 2 * mesh.n_nodes)


def assemble_vector_mass(mesh: Mesh) -> sp.csr_matrix:
    """Consistent mass for vector fields, ``int u . v``."""
    M = assemble_scalar_mass(mesh).tocoo()
    n = mesh.n_nodes
    rows = np.concatenate([2 * M.row, 2 * M.row + 1])
    cols = np.concatenate([2 * M.col, 2 * M.col + 1])
    return _assemble(rows, cols, np.concatenate([M.data, M.data]), 2 * n)


def assemble_boundary_mass(mesh: Mesh, tags=None) -> sp.csr_matrix:
    """``int_Gamma u v`` over boundary edges (all of them when ``tags`` is None)."""
    mask = np.ones(len(mesh.boundary_edges), dtype=bool)
    if tags is not None:
        mask = np.isin(mesh.boundary_tags, list(tags))
    e = mesh.boundary_edges[mask]
    d = mesh.nodes[e[:, 1]] - mesh.nodes[e[:, 0]]
    L = np.hypot(d[:, 0], d[:, 1])
    local = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    me = L[:, None, None] * local[None]
    rows = np.repeat(e, 2, axis=1)
    cols = np.tile(e, (1, 2))
    return _assemble(rows, cols, me.reshape(len(L), 4), mesh.n_nodes)


def assemble_boundary_traction(mesh: Mesh, tag: str, g, scale: float = 1.0) -> np.ndarray:
    """Load vector ``scale * int_{Gamma_tag} g . v`` (length 2N).

    ``g`` is a constant 2-vector, an array with one 2-vector per tagged edge,
    or a callable ``g(x, y) -> (gx, gy)`` integrated with three-point Gauss.
    """
    edges, _, lengths = boundary_edges_with_tag(mesh, tag)
    load = np.zeros(2 * mesh.n_nodes)
    if len(edges) == 0:
        return load
    if callable(g):
        p0 = mesh.nodes[edges[:, 0]]
        p1 = mesh.nodes[edges[:, 1]]
        f0 = np.zeros((len(edges), 2))
        f1 = np.zeros((len(edges), 2))
        for t, w in zip(_EDGE_GAUSS_T, _EDGE_GAUSS_W):
            x = (1.0 - t) * p0 + t * p1
            gx, gy = g(x[:, 0], x[:, 1])
            val = np.column_stack([np.broadcast_to(gx, len(x)), np.broadcast_to(gy, len(x))])
            f0 += w * (1.0 - t) * val
            f1 += w * t * val
        f0 *= lengths[:, None]
        f1 *= lengths[:, None]
    else:
        gv = np.broadcast_to(np.asarray(g, dtype=float), (len(edges), 2))
        f0 = f1 = 0.5 * lengths[:, None] * gv
    for comp in range(2):
        load += np.bincount(2 * edges[:, 0] + comp, weights=f0[:, comp], minlength=2 * mesh.n_nodes)
        load += np.bincount(2 * edges[:, 1] + comp, weights=f1[:, comp], minlength=2 * mesh.n_nodes)
    return scale * load


def assemble_boundary_load(mesh: Mesh, values: np.ndarray, tags=None) -> np.ndarray:
    """``int_Gamma h v`` for nodal boundary data ``h`` (P1 trace)."""
    return assemble_boundary_mass(mesh, tags) @ np.asarray(values, dtype=float)


def assemble_load(mesh: Mesh, f) -> np.ndarray:
    """Scalar load ``int f v``.

    ``f`` is a per-triangle constant array (integrated exactly) or a
    callable ``f(x, y)`` integrated with a degree-4 rule.
    """
    n = mesh.n_nodes
    if callable(f):
        p = mesh.nodes[mesh.triangles]
        bary, w = _TRI_RULE
        fe = np.zeros((mesh.n_triangles, 3))
        for lam, wq in zip(bary, w):
            x = lam @ p  # (ntri, 2)
            fx = np.broadcast_to(f(x[:, 0], x[:, 1]), mesh.n_triangles)
            fe += wq * fx[:, None] * lam[None, :]
        fe *= mesh.areas[:, None]
    else:
        fv = np.asarray(f, dtype=float)
        if fv.shape != (mesh.n_triangles,):
            raise ValueError("per-triangle data must have one value per triangle")
        fe = np.repeat((fv * mesh.areas / 3.0)[:, None], 3, axis=1)
    return np.bincount(mesh.triangles.ravel(), weights=fe.ravel(), minlength=n)


def assemble_vector_load(mesh: Mesh, f) -> np.ndarray:
    """Vector load ``int f . v`` for a callable ``f(x, y) -> (fx, fy)``."""
    fx = assemble_load(mesh, lambda x, y: f(x, y)[0])
    fy = assemble_load(mesh, lambda x, y: f(x, y)[1])
    out = np.empty(2 * mesh.n_nodes)
    out[0::2] = fx
    out[1::2] = fy
    return out


def l2_error(mesh: Mesh, values: np.ndarray, exact) -> float:
    """``||u_h - u||_{L2}`` for a nodal P1 field and a callable exact field.

    Vector fields (shape ``(N, 2)``) take ``exact(x, y) -> (ux, uy)``.
    """
    values = np.asarray(values, dtype=float)
    p = mesh.nodes[mesh.triangles]
    bary, w = _TRI_RULE
    err = np.zeros(mesh.n_triangles)
    local = values[mesh.triangles]
    for lam, wq in zip(bary, w):
        x = lam @ p
        uh = np.tensordot(lam, local, axes=(0, 1))
        ue = exact(x[:, 0], x[:, 1])
        if values.ndim == 2:
            ue = np.column_stack([np.broadcast_to(u, mesh.n_triangles) for u in ue])
            d2 = np.sum((uh - ue) ** 2, axis=1)
        else:
            d2 = (uh - ue) ** 2
        err += wq * d2
    return float(np.sqrt(np.sum(err * mesh.areas)))
