"""Pure-Python/NumPy versions of the inner kernels.

Same signatures and results as the compiled ``_kernels`` extension; used
when the extension is not built.
"""

import numpy as np

# face labels of the admissible triangle K = {x >= 0, y >= 0, x + y <= 1}
FACE_INTERIOR = 0
FACE_X0 = 1  # edge x = 0
FACE_Y0 = 2  # edge y = 0
FACE_HYP = 3  # edge x + y = 1
VERTEX_00 = 4
VERTEX_10 = 5
VERTEX_01 = 6


def project_triangle(points):
    """Euclidean projection of each row onto K, with the face reached."""
    pts = np.asarray(points, dtype=float)
    x = pts[:, 0]
    y = pts[:, 1]
    px = x.copy()
    py = y.copy()
    face = np.zeros(len(pts), dtype=np.int8)

    hyp = x + y > 1.0
    t = 0.5 * (x - y + 1.0)
    m = hyp & (t <= 0.0)
    px[m], py[m], face[m] = 0.0, 1.0, VERTEX_01
    m = hyp & (t >= 1.0)
    px[m], py[m], face[m] = 1.0, 0.0, VERTEX_10
    m = hyp & (t > 0.0) & (t < 1.0)
    px[m], py[m], face[m] = t[m], 1.0 - t[m], FACE_HYP

    rest = ~hyp
    m = rest & (x < 0.0) & (y < 0.0)
    px[m], py[m], face[m] = 0.0, 0.0, VERTEX_00
    m = rest & (x < 0.0) & (y >= 0.0)
    py_m = np.minimum(y[m], 1.0)
    px[m], py[m] = 0.0, py_m
    face[m] = np.where(py_m >= 1.0, VERTEX_01, FACE_X0)
    m = rest & (y < 0.0) & (x >= 0.0)
    px_m = np.minimum(x[m], 1.0)
    px[m], py[m] = px_m, 0.0
    face[m] = np.where(px_m >= 1.0, VERTEX_10, FACE_Y0)
    return np.column_stack([px, py]), face


def _qp_value(H, g, y0, y1):
    return 0.5 * (H[0] * y0 * y0 + 2.0 * H[1] * y0 * y1 + H[3] * y1 * y1) - g[0] * y0 - g[1] * y1


def local_qp(H, g):
    """Minimise ``0.5 y'Hy - g'y`` over K for a 2x2 SPD ``H`` (flat, row-major)."""
    det = H[0] * H[3] - H[1] * H[2]
    y0 = (H[3] * g[0] - H[1] * g[1]) / det
    y1 = (H[0] * g[1] - H[2] * g[0]) / det
    if y0 >= 0.0 and y1 >= 0.0 and y0 + y1 <= 1.0:
        return y0, y1
    best = None
    # edges as p + t d, t in [0, 1]
    for px, py, dx, dy in ((0.0, 0.0, 1.0, 0.0), (0.0, 0.0, 0.0, 1.0), (1.0, 0.0, -1.0, 1.0)):
        hd0 = H[0] * dx + H[1] * dy
        hd1 = H[2] * dx + H[3] * dy
        dhd = dx * hd0 + dy * hd1
        hp0 = H[0] * px + H[1] * py
        hp1 = H[2] * px + H[3] * py
        t = (dx * (g[0] - hp0) + dy * (g[1] - hp1)) / dhd
        t = min(max(t, 0.0), 1.0)
        cx, cy = px + t * dx, py + t * dy
        val = _qp_value(H, g, cx, cy)
        if best is None or val < best[0]:
            best = (val, cx, cy)
    return best[1], best[2]


def pgs_sweeps(indptr, indices, data, coupling, rhs, chi, max_sweeps, tol):
    """Projected block Gauss-Seidel on ``(S kron M2) chi + r = rhs`` with chi in K.

    ``S`` is the scalar CSR operator, ``coupling`` the flat 2x2 ``M2``.
    ``chi`` (n, 2) is updated in place.  Sweeps stop once the largest nodal
    change is at most ``tol``.  Returns ``(sweeps, last_change)``.
    """
    n = len(indptr) - 1
    m = [float(v) for v in np.asarray(coupling, dtype=float).ravel()]
    change = np.inf
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        change = 0.0
        for i in range(n):
            s0 = 0.0
            s1 = 0.0
            sii = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                s0 += data[k] * chi[j, 0]
                s1 += data[k] * chi[j, 1]
                if j == i:
                    sii = data[k]
            r0 = rhs[i, 0] - (m[0] * s0 + m[1] * s1)
            r1 = rhs[i, 1] - (m[2] * s0 + m[3] * s1)
            H = (sii * m[0], sii * m[1], sii * m[2], sii * m[3])
            c0, c1 = chi[i, 0], chi[i, 1]
            g = (r0 + H[0] * c0 + H[1] * c1, r1 + H[2] * c0 + H[3] * c1)
            y0, y1 = local_qp(H, g)
            change = max(change, abs(y0 - c0), abs(y1 - c1))
            chi[i, 0] = y0
            chi[i, 1] = y1
        if change <= tol:
            break
    return sweeps, change


def kkt_grid_min(i_lo, i_hi, j_lo, j_hi, n, coupling, c, chi2m, chi3m, T_minus, diss, l_a, C, T0, gamma):
    """Lattice point ``(i/n, j/n)`` in K with the smallest homogeneous KKT residual.

    The residual is the squared natural residual
    ``|chi - P_K(chi - g(chi)/gamma)|^2`` of the homogeneous phase problem
    with temperature eliminated through the energy balance.
    Returns ``(i, j, residual)``.
    """
    ii = np.arange(max(i_lo, 0), min(i_hi, n) + 1)
    jj = np.arange(max(j_lo, 0), min(j_hi, n) + 1)
    I, J = np.meshgrid(ii, jj, indexing="ij")
    ok = I + J <= n
    I, J = I[ok], J[ok]
    x2 = I / n
    x3 = J / n
    m = np.asarray(coupling, dtype=float).ravel()
    T = T_minus + (diss - l_a * (x3 - chi3m)) / C
    d2 = x2 - chi2m
    d3 = x3 - chi3m
    drive = (l_a / T0) * (T - T0)
    g2 = c * (m[0] * d2 + m[1] * d3)
    g3 = c * (m[2] * d2 + m[3] * d3) - drive
    proj, _ = project_triangle(np.column_stack([x2 - g2 / gamma, x3 - g3 / gamma]))
    res = (x2 - proj[:, 0]) ** 2 + (x3 - proj[:, 1]) ** 2
    k = int(np.argmin(res))
    return int(I[k]), int(J[k]), float(res[k])
