"""Kernel dispatch: the compiled extension when built, NumPy otherwise.

``BACKEND`` names the implementation chosen at import.  ``backend(name)``
returns a specific one, which the tests and the benchmark use to compare
the two.
"""

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

from ._kernels_py import (  # noqa: F401  (face labels are shared)
    FACE_HYP,
    FACE_INTERIOR,
    FACE_X0,
    FACE_Y0,
    VERTEX_00,
    VERTEX_01,
    VERTEX_10,
)

BACKEND = "compiled" if _compiled is not None else "python"
_active = _compiled if _compiled is not None else _kernels_py


def available():
    return ("compiled", "python") if _compiled is not None else ("python",)


def backend(name=None):
    if name is None:
        return _active
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def project_triangle(points):
    return _active.project_triangle(points)


def local_qp(H, g):
    return _active.local_qp(H, g)


def pgs_sweeps(indptr, indices, data, coupling, rhs, chi, max_sweeps, tol):
    return _active.pgs_sweeps(indptr, indices, data, coupling, rhs, chi, max_sweeps, tol)


def kkt_grid_min(*args):
    return _active.kkt_grid_min(*args)
