"""Compiled vs pure-Python kernels on the workloads the solver actually runs.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times per kernel and backend and the speed-up.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sma_collision import kernels
from sma_collision.closedform import ClosedFormInput, _kkt_gamma
from sma_collision.params import MaterialParams, PhaseVariant
from sma_collision.phase import PhaseProblem
from sma_collision.mesh import build_structured_mesh


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def workloads(n_points=200_000, mesh_n=40, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 2.0, size=(n_points, 2))

    params = MaterialParams.niti()
    mesh = build_structured_mesh(mesh_n, mesh_n, 1e-3, 1e-3)
    prob = PhaseProblem(mesh, params, (0.5, 0.5, 0.0))
    S = prob.S
    F = prob.load(np.full(mesh.n_nodes, params.T0 + 5.0))
    indptr, indices = S.indptr.astype(np.int64), S.indices.astype(np.int64)

    inp = ClosedFormInput.from_params(params, 0.9 * params.T0, (0.5, 0.5, 0.0), 2.5e8)
    M2 = PhaseVariant.UNIFORM.coupling
    grid_args = (0, 1000, 0, 1000, 1000, M2.ravel(), inp.c, 0.5, 0.0, inp.T_minus,
                 inp.diss_work, inp.l_a, inp.C, inp.T0, _kkt_gamma(inp, M2))

    def project(mod):
        return lambda: mod.project_triangle(pts)

    def pgs(mod):
        def run():
            chi = np.ascontiguousarray(prob.chi_minus.copy())
            mod.pgs_sweeps(indptr, indices, S.data, M2, F, chi, 50, 0.0)
        return run

    def grid(mod):
        return lambda: mod.kkt_grid_min(*grid_args)

    return {
        f"project_triangle ({n_points} points)": project,
        f"pgs_sweeps (50 sweeps, {mesh.n_nodes} nodes)": pgs,
        "kkt_grid_min (1001x1001 lattice)": grid,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = kernels.available()
    print(f"backends available: {', '.join(names)}")
    for label, make in workloads().items():
        times = {b: _best(make(kernels.backend(b)), args.repeat) for b in names}
        line = "  ".join(f"{b} {t * 1e3:9.2f} ms" for b, t in times.items())
        if len(times) == 2:
            line += f"  speed-up x{times['python'] / times['compiled']:.1f}"
        print(f"{label:45s} {line}")


if __name__ == "__main__":
    main()
