"""Command-line driver: ``sma-collide <subcommand> ...``.

Exit status is 0 on success, 1 when a solver does not converge and 2 for
configuration or usage errors.  Dissipated work on the command line is in
J/m^3.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .closedform import ClosedFormInput, brute_force_0d, solve_0d, sweep_0d
from .config import load_config
from .coupling import solve_collision
from .errors import ConfigError, SolverError
from .mms import run_study
from .output import write_diagnostics, write_fields_csv, write_vtk
from .params import PhaseVariant

logger = logging.getLogger("sma_collision")

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_CONFIG = 2


def _cmd_collide(args) -> int:
    cfg = load_config(args.config)
    if args.prescribed_diss is not None and args.prescribed_diss < 0.0:
        raise ConfigError("--prescribed-diss", "must be nonnegative")
    mesh = cfg.build_mesh()
    s = cfg.solver
    result = solve_collision(
        mesh,
        cfg.material_params(),
        cfg.pre_state(),
        cfg.load(),
        cfg.thermal(),
        cfg.fixed_point(),
        prescribed_diss=args.prescribed_diss,
        lin_tol=s.lin_tol,
        vi_tol=s.vi_tol,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_fields_csv(result, mesh, out / "fields.csv")
    write_vtk(result, mesh, out / "fields.vtk")
    write_diagnostics(
        result,
        out / "diagnostics.json",
        {"nodes": mesh.n_nodes, "triangles": mesh.n_triangles, "kernels": kernels.BACKEND},
    )
    d = result.diagnostics
    print(f"fixed point: {d.iterations} iterations, converged={d.converged}")
    print(f"T+ in [{result.T_plus.min():.6g}, {result.T_plus.max():.6g}] K, max beta3+ = {result.beta_plus[:, 2].max():.6g}")
    print(f"wrote {out / 'fields.csv'}, {out / 'fields.vtk'}, {out / 'diagnostics.json'}")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _closed_form_input(cfg, diss):
    p = cfg.material_params()
    try:
        return ClosedFormInput.from_params(p, cfg.initial.T_minus, cfg.initial.beta_minus, diss), p
    except ValueError as exc:
        raise ConfigError("--diss", str(exc)) from None


def _cmd_closed_form(args) -> int:
    cfg = load_config(args.config)
    inp, p = _closed_form_input(cfg, args.diss)
    b = inp.beta_minus
    if p.variant is PhaseVariant.UNIFORM and abs(b[0] - b[1]) <= 1e-12:
        sol, how = solve_0d(inp), "closed form"
    else:
        sol, how = brute_force_0d(inp, p.variant), "lattice search"
    print(f"regime: {sol.regime.value} ({how})")
    print(f"T_plus = {sol.T_plus:.17g}")
    print("beta_plus = " + ", ".join(f"{v:.17g}" for v in sol.beta_plus))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.samples < 1:
        raise ConfigError("--samples", "must be at least 1")
    if not 0.0 <= args.diss_min <= args.diss_max:
        raise ConfigError("--diss-min", "need 0 <= diss-min <= diss-max")
    b = cfg.initial.beta_minus
    if abs(b[0] - b[1]) > 1e-12:
        raise ConfigError("initial.beta_minus", "sweep needs beta1- == beta2-")
    rows = sweep_0d(cfg.initial.T_minus, cfg.material_params(), args.diss_min, args.diss_max, args.samples, b)
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["diss", "T_plus", "beta3", "regime"])
        for r in rows:
            w.writerow([f"{r.diss:.17g}", f"{r.T_plus:.17g}", f"{r.beta3:.17g}", r.regime.value])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _cmd_mms(args) -> int:
    if args.levels < 2:
        raise ConfigError("--levels", "need at least 2 levels")
    for study in run_study(args.levels, args.coarsest):
        print("\n".join(study.lines()))
    return EXIT_OK


def _cmd_project(args) -> int:
    p = np.array([args.x, args.y], dtype=float)
    proj, face = kernels.project_triangle(p.reshape(1, 2))
    print(json.dumps({"point": p.tolist(), "projection": proj[0].tolist(), "face": int(face[0])}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sma-collide", description="Post-collision state of a shape-memory-alloy solid.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("collide", help="full 2D collision solve")
    c.add_argument("config")
    c.add_argument("--out", default="out")
    c.add_argument("--prescribed-diss", type=float, default=None, metavar="VALUE",
                   help="uniform dissipated work [J/m^3]; skips the velocity solve")
    c.set_defaults(func=_cmd_collide)

    cf = sub.add_parser("closed-form", help="homogeneous solution for a given dissipated work")
    cf.add_argument("config")
    cf.add_argument("--diss", type=float, required=True, metavar="VALUE")
    cf.set_defaults(func=_cmd_closed_form)

    sw = sub.add_parser("sweep", help="closed form over a range of dissipated work (CSV)")
    sw.add_argument("config")
    sw.add_argument("--diss-min", type=float, required=True)
    sw.add_argument("--diss-max", type=float, required=True)
    sw.add_argument("--samples", type=int, required=True)
    sw.add_argument("--out", default=None, help="CSV path (default: stdout)")
    sw.set_defaults(func=_cmd_sweep)

    m = sub.add_parser("mms", help="manufactured-solution convergence report")
    m.add_argument("--levels", type=int, default=4)
    m.add_argument("--coarsest", type=int, default=8)
    m.set_defaults(func=_cmd_mms)

    pr = sub.add_parser("project", help="nearest point of the phase triangle K")
    pr.add_argument("x", type=float)
    pr.add_argument("y", type=float)
    pr.set_defaults(func=_cmd_project)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
