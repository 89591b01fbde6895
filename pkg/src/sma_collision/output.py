"""Result files: nodal CSV, legacy ASCII VTK and JSON diagnostics.

Numbers are written with 17 significant digits, enough for an exact
round trip of IEEE doubles, and every writer is deterministic.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .coupling import CollisionResult
from .mesh import Mesh

CSV_COLUMNS = ("x", "y", "Ux", "Uy", "T_plus", "beta1", "beta2", "beta3", "diss")
VTK_SCALARS = ("T_plus", "beta1", "beta2", "beta3", "diss")
VTK_TRIANGLE = 5


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def nodal_table(result: CollisionResult, mesh: Mesh) -> np.ndarray:
    """``(N, 9)`` array in :data:`CSV_COLUMNS` order."""
    return np.column_stack(
        [mesh.nodes, result.U_plus, result.T_plus, result.beta_plus, result.diss.nodal]
    )


def _open_for_write(path):
    path = Path(path)
    try:
        return path.open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def write_fields_csv(result: CollisionResult, mesh: Mesh, path) -> None:
    table = nodal_table(result, mesh)
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in table:
            w.writerow([_fmt(v) for v in row])


def read_fields_csv(path) -> dict[str, np.ndarray]:
    """Columns of a fields CSV by name."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def write_vtk(result: CollisionResult, mesh: Mesh, path, title: str = "post-collision state") -> None:
    """Legacy ASCII VTK 3.0 unstructured grid with nodal data."""
    n = mesh.n_nodes
    tri = mesh.triangles
    scalars = {
        "T_plus": result.T_plus,
        "beta1": result.beta_plus[:, 0],
        "beta2": result.beta_plus[:, 1],
        "beta3": result.beta_plus[:, 2],
        "diss": result.diss.nodal,
    }
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID"]
    lines.append(f"POINTS {n} double")
    lines.extend(f"{_fmt(x)} {_fmt(y)} 0" for x, y in mesh.nodes)
    lines.append(f"CELLS {len(tri)} {4 * len(tri)}")
    lines.extend(f"3 {a} {b} {c}" for a, b, c in tri)
    lines.append(f"CELL_TYPES {len(tri)}")
    lines.extend([str(VTK_TRIANGLE)] * len(tri))
    lines.append(f"POINT_DATA {n}")
    for name in VTK_SCALARS:
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(_fmt(v) for v in scalars[name])
    lines.append("VECTORS U_plus double")
    lines.extend(f"{_fmt(u)} {_fmt(v)} 0" for u, v in result.U_plus)
    with _open_for_write(path) as fh:
        fh.write("\n".join(lines) + "\n")


def write_diagnostics(result: CollisionResult, path, extra: dict | None = None) -> None:
    doc = result.diagnostics.as_dict()
    if extra:
        doc.update(extra)
    with _open_for_write(path) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
