"""Structured triangular meshes of rectangles with tagged boundary segments.

The solid occupies ``[0, W] x [0, H]``.  Boundary edges carry one tag out of
``Gamma0`` (clamped support), ``Gamma1`` (loaded segment) and ``GammaFree``.
Tags are assigned from the edge midpoint, so a region given as a fraction
interval of one side picks exactly the edges whose midpoints fall inside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import AssemblyError

GAMMA0 = "Gamma0"
GAMMA1 = "Gamma1"
GAMMA_FREE = "GammaFree"
TAGS = (GAMMA0, GAMMA1, GAMMA_FREE)

SIDES = ("bottom", "right", "top", "left")


@dataclass(frozen=True)
class BoundaryRegion:
    """Part of one rectangle side, as a fraction interval ``[start, stop]``.

    Fractions run along the side in the +x direction for bottom/top and the
    +y direction for left/right.
    """

    side: str
    start: float = 0.0
    stop: float = 1.0

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"unknown side {self.side!r}, expected one of {SIDES}")
        if not (0.0 <= self.start <= self.stop <= 1.0):
            raise ValueError(f"bad fraction interval [{self.start}, {self.stop}]")

    @property
    def length_fraction(self) -> float:
        return self.stop - self.start


@dataclass(frozen=True)
class BoundarySpec:
    """Where the support (Gamma0) and the percussion (Gamma1) act.

    Defaults follow the collision experiment: clamped bottom face and a
    loaded segment of one third of the top face, centred.  ``gamma1=None``
    means no loaded segment.
    """

    gamma0: BoundaryRegion = BoundaryRegion("bottom", 0.0, 1.0)
    gamma1: BoundaryRegion | None = BoundaryRegion("top", 1.0 / 3.0, 2.0 / 3.0)

    def __post_init__(self):
        if self.gamma0 is None or self.gamma0.length_fraction <= 0.0:
            raise ValueError("Gamma0 must have positive length")
        g1 = self.gamma1
        if g1 is not None and g1.side == self.gamma0.side:
            lo = max(g1.start, self.gamma0.start)
            hi = min(g1.stop, self.gamma0.stop)
            if hi > lo:
                raise ValueError("Gamma0 and Gamma1 overlap")


class TaggedEdges(NamedTuple):
    edges: np.ndarray  # (k, 2) node indices, oriented counterclockwise
    normals: np.ndarray  # (k, 2) outward unit normals
    lengths: np.ndarray  # (k,)


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangle mesh.

    ``boundary_edges`` are oriented so that the owning triangle lies on the
    left, which makes ``(dy, -dx) / L`` the outward normal.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    edge_owner: np.ndarray
    width: float
    height: float
    _areas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("nodes", "triangles", "boundary_edges", "boundary_tags", "edge_owner"):
            getattr(self, name).setflags(write=False)
        p = self.nodes[self.triangles]
        area = 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )
        bad = np.flatnonzero(~(area > 0.0))
        if bad.size:
            raise AssemblyError(f"triangle {bad[0]} has nonpositive signed area {area[bad[0]]!r}")
        area.setflags(write=False)
        object.__setattr__(self, "_areas", area)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def areas(self) -> np.ndarray:
        return self._areas

    @property
    def boundary_nodes(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def tag_nodes(self, tag: str) -> np.ndarray:
        """Sorted node indices touching an edge with ``tag``."""
        return np.unique(self.boundary_edges[self.boundary_tags == tag])


def _edge_geometry(nodes, edges):
    d = nodes[edges[:, 1]] - nodes[edges[:, 0]]
    lengths = np.hypot(d[:, 0], d[:, 1])
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    return normals, lengths


def boundary_edges_with_tag(mesh: Mesh, tag: str) -> TaggedEdges:
    """Edges carrying ``tag`` with their outward unit normals and lengths."""
    if tag not in TAGS:
        raise ValueError(f"unknown tag {tag!r}")
    edges = mesh.boundary_edges[mesh.boundary_tags == tag]
    normals, lengths = _edge_geometry(mesh.nodes, edges)
    return TaggedEdges(edges, normals, lengths)


def _side_coordinate(mid, side, width, height, tol):
    """Fractional position of each midpoint along ``side`` (NaN when off it)."""
    x, y = mid[:, 0], mid[:, 1]
    if side == "bottom":
        on, s = np.abs(y) <= tol, x / width
    elif side == "top":
        on, s = np.abs(y - height) <= tol, x / width
    elif side == "left":
        on, s = np.abs(x) <= tol, y / height
    else:
        on, s = np.abs(x - width) <= tol, y / height
    return np.where(on, s, np.nan)


def _in_region(mid, region, width, height, tol):
    if region is None:
        return np.zeros(len(mid), dtype=bool)
    s = _side_coordinate(mid, region.side, width, height, tol)
    with np.errstate(invalid="ignore"):
        return (s >= region.start) & (s <= region.stop)


def build_structured_mesh(
    nx: int,
    ny: int,
    width: float,
    height: float,
    spec: BoundarySpec | None = None,
    diagonal: str = "right",
) -> Mesh:
    """Split an ``nx`` by ``ny`` grid of cells into two triangles each.

    ``diagonal="right"`` cuts every cell from lower-left to upper-right,
    ``"left"`` from lower-right to upper-left (the mirror image), and
    ``"alternating"`` switches between the two in a checkerboard.
    """
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise ValueError(f"cell counts must be positive integers, got nx={nx}, ny={ny}")
    if not (width > 0.0 and height > 0.0):
        raise ValueError(f"dimensions must be positive, got width={width}, height={height}")
    if diagonal not in ("right", "left", "alternating"):
        raise ValueError(f"unknown diagonal {diagonal!r}")
    nx, ny = int(nx), int(ny)
    spec = spec if spec is not None else BoundarySpec()

    i = np.arange(nx + 1)
    j = np.arange(ny + 1)
    xs = width * i / nx
    ys = height * j / ny
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    ci, cj = np.meshgrid(np.arange(nx), np.arange(ny))
    ci, cj = ci.ravel(), cj.ravel()
    n00 = cj * (nx + 1) + ci
    n10 = n00 + 1
    n01 = n00 + nx + 1
    n11 = n01 + 1
    if diagonal == "right":
        right = np.ones_like(ci, dtype=bool)
    elif diagonal == "left":
        right = np.zeros_like(ci, dtype=bool)
    else:
        right = (ci + cj) % 2 == 0
    t1 = np.where(right[:, None], np.column_stack([n00, n10, n11]), np.column_stack([n00, n10, n01]))
    t2 = np.where(right[:, None], np.column_stack([n00, n11, n01]), np.column_stack([n10, n11, n01]))
    triangles = np.empty((2 * nx * ny, 3), dtype=np.int64)
    triangles[0::2] = t1
    triangles[1::2] = t2

    # counterclockwise walk: bottom, right, top, left
    bottom = np.column_stack([i[:-1], i[1:]])
    right_side = np.column_stack([j[:-1] * (nx + 1) + nx, j[1:] * (nx + 1) + nx])
    top_row = ny * (nx + 1)
    top = np.column_stack([top_row + i[1:], top_row + i[:-1]])[::-1]
    left = np.column_stack([j[1:] * (nx + 1), j[:-1] * (nx + 1)])[::-1]
    bedges = np.vstack([bottom, right_side, top, left]).astype(np.int64)

    owner = _edge_owners(triangles, bedges)

    mid = 0.5 * (nodes[bedges[:, 0]] + nodes[bedges[:, 1]])
    tol = 1e-12 * max(width, height)
    in0 = _in_region(mid, spec.gamma0, width, height, tol)
    in1 = _in_region(mid, spec.gamma1, width, height, tol)
    tags = np.full(len(bedges), GAMMA_FREE, dtype=object)
    tags[in1] = GAMMA1
    tags[in0] = GAMMA0
    if not in0.any():
        raise ValueError("Gamma0 region selects no boundary edge at this resolution")
    return Mesh(nodes, triangles, bedges, tags.astype(str), owner, float(width), float(height))


def _edge_owners(triangles, bedges):
    """Index of the single triangle containing each boundary edge."""
    local = np.vstack([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    tri_of = np.tile(np.arange(len(triangles)), 3)
    key = np.sort(local, axis=1)
    lookup = {}
    for (a, b), t in zip(map(tuple, key), tri_of):
        lookup.setdefault((a, b), []).append(t)
    owner = np.empty(len(bedges), dtype=np.int64)
    for k, (a, b) in enumerate(bedges):
        owners = lookup[(min(a, b), max(a, b))]
        if len(owners) != 1:
            raise AssemblyError(f"boundary edge {k} belongs to {len(owners)} triangles")
        owner[k] = owners[0]
    return owner
