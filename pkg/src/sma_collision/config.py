"""Run configuration files.

A run is described by a TOML document in engineering units:

=================  ===========================================  =============
section            keys                                         units
=================  ===========================================  =============
``material``       rho                                          kg/m^3
                   k_v                                          MPa s
                   c, l_a                                       MJ/m^3
                   upsilon, kappa_interfacial                   MPa mm^2
                   lambda                                       W s/(K m)
                   C                                            MJ/(m^3 K)
                   T0                                           K
                   variant                                      name
``geometry``       width, height                                mm
                   nx, ny                                       cells
                   gamma0, gamma1: {side, start, stop}          side fractions
``percussion``     magnitude                                    MPa s
                   angle_deg                                    degrees
``initial``        T_minus                                      K
                   beta_minus                                   3 fractions
``thermal_bc``     kind, h_coeff (W s/(K m^2)), T_ext (K)
``solver``         fp_tol, fp_max_iter, relaxation, lin_tol, vi_tol
=================  ===========================================  =============

:class:`RunConfig` keeps the values exactly as written, so a load/dump/load
cycle is lossless; the SI conversion happens in its accessor methods and
nowhere else.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .coupling import FixedPointConfig
from .errors import ConfigError
from .mesh import SIDES, BoundaryRegion, BoundarySpec, Mesh, build_structured_mesh
from .params import MaterialParams, PhaseVariant, PreState
from .thermal import ADIABATIC, ROBIN, ThermalBC
from .velocity import PercussionLoad

MEGA = 1e6
MILLI = 1e-3


@dataclass(frozen=True)
class MaterialSection:
    rho: float
    k_v: float
    c: float
    upsilon: float
    kappa_interfacial: float
    # ``lambda`` in the file
    lam: float
    C: float
    l_a: float
    T0: float
    variant: str = PhaseVariant.UNIFORM.value


@dataclass(frozen=True)
class RegionSection:
    side: str
    start: float = 0.0
    stop: float = 1.0


@dataclass(frozen=True)
class GeometrySection:
    width: float = 1.0
    height: float = 1.0
    nx: int = 100
    ny: int = 100
    gamma0: RegionSection = RegionSection("bottom", 0.0, 1.0)
    gamma1: RegionSection | None = RegionSection("top", 1.0 / 3.0, 2.0 / 3.0)
    diagonal: str = "right"


@dataclass(frozen=True)
class PercussionSection:
    magnitude: float
    angle_deg: float = 90.0


@dataclass(frozen=True)
class InitialSection:
    T_minus: float
    beta_minus: tuple = (0.5, 0.5, 0.0)


@dataclass(frozen=True)
class ThermalSection:
    kind: str = ADIABATIC
    h_coeff: float = 0.0
    T_ext: float = 0.0


@dataclass(frozen=True)
class SolverSection:
    fp_tol: float = 1e-8
    fp_max_iter: int = 200
    relaxation: float = 1.0
    lin_tol: float = 1e-10
    vi_tol: float = 1e-10


@dataclass(frozen=True)
class RunConfig:
    material: MaterialSection
    geometry: GeometrySection
    percussion: PercussionSection
    initial: InitialSection
    thermal_bc: ThermalSection = ThermalSection()
    solver: SolverSection = field(default_factory=SolverSection)

    def material_params(self) -> MaterialParams:
        m = self.material
        return MaterialParams(
            rho=m.rho,
            k_v=m.k_v * MEGA,
            c=m.c * MEGA,
            # MPa mm^2 = 1 J/m
            upsilon=m.upsilon,
            kappa=m.kappa_interfacial,
            lam=m.lam,
            C=m.C * MEGA,
            l_a=m.l_a * MEGA,
            T0=m.T0,
            variant=PhaseVariant.parse(m.variant),
        )

    def boundary_spec(self) -> BoundarySpec:
        g = self.geometry
        g1 = None if g.gamma1 is None else BoundaryRegion(g.gamma1.side, g.gamma1.start, g.gamma1.stop)
        return BoundarySpec(BoundaryRegion(g.gamma0.side, g.gamma0.start, g.gamma0.stop), g1)

    def build_mesh(self) -> Mesh:
        g = self.geometry
        return build_structured_mesh(g.nx, g.ny, g.width * MILLI, g.height * MILLI, self.boundary_spec(), g.diagonal)

    def load(self) -> PercussionLoad:
        p = self.percussion
        return PercussionLoad.from_degrees(p.magnitude * MEGA, p.angle_deg)

    def pre_state(self) -> PreState:
        return PreState(self.initial.T_minus, tuple(self.initial.beta_minus))

    def thermal(self) -> ThermalBC:
        t = self.thermal_bc
        return ThermalBC(t.kind, t.h_coeff, t.T_ext)

    def fixed_point(self) -> FixedPointConfig:
        s = self.solver
        return FixedPointConfig(s.fp_tol, s.fp_max_iter, s.relaxation)


# ---------------------------------------------------------------- parsing


def _number(section: dict, key: str, path: str, *, required=True, default=None, kind=float):
    if key not in section:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}.{key}", "value must be finite")
    return value


def _section(doc: dict, name: str, required=True) -> dict:
    if name not in doc:
        if required:
            raise ConfigError(name, "missing required section")
        return {}
    sec = doc[name]
    if not isinstance(sec, dict):
        raise ConfigError(name, "expected a table")
    return sec


def _check_unknown(section: dict, allowed, path: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown key")


def _positive(value, key):
    if not value > 0.0:
        raise ConfigError(key, f"must be positive, got {value!r}")


def _nonnegative(value, key):
    if not value >= 0.0:
        raise ConfigError(key, f"must be nonnegative, got {value!r}")


def _parse_material(doc) -> MaterialSection:
    sec = _section(doc, "material")
    keys = ("rho", "k_v", "c", "upsilon", "kappa_interfacial", "lambda", "C", "l_a", "T0")
    _check_unknown(sec, keys + ("variant",), "material")
    vals = {k: _number(sec, k, "material") for k in keys}
    for k in ("rho", "k_v", "C", "l_a", "T0"):
        _positive(vals[k], f"material.{k}")
    for k in ("c", "upsilon", "kappa_interfacial", "lambda"):
        _nonnegative(vals[k], f"material.{k}")
    variant = sec.get("variant", PhaseVariant.UNIFORM.value)
    try:
        variant = PhaseVariant.parse(variant).value
    except ValueError as exc:
        raise ConfigError("material.variant", str(exc)) from None
    vals["lam"] = vals.pop("lambda")
    return MaterialSection(**vals, variant=variant)


def _parse_region(raw, path) -> RegionSection:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a table {side, start, stop}")
    _check_unknown(raw, ("side", "start", "stop"), path)
    side = raw.get("side")
    if side not in SIDES:
        raise ConfigError(f"{path}.side", f"expected one of {SIDES}, got {side!r}")
    start = _number(raw, "start", path, required=False, default=0.0)
    stop = _number(raw, "stop", path, required=False, default=1.0)
    if not 0.0 <= start <= stop <= 1.0:
        raise ConfigError(path, f"need 0 <= start <= stop <= 1, got [{start}, {stop}]")
    return RegionSection(side, start, stop)


def _parse_geometry(doc) -> GeometrySection:
    sec = _section(doc, "geometry", required=False)
    _check_unknown(sec, ("width", "height", "nx", "ny", "gamma0", "gamma1", "diagonal"), "geometry")
    d = GeometrySection()
    width = _number(sec, "width", "geometry", required=False, default=d.width)
    height = _number(sec, "height", "geometry", required=False, default=d.height)
    _positive(width, "geometry.width")
    _positive(height, "geometry.height")
    nx = _number(sec, "nx", "geometry", required=False, default=d.nx, kind=int)
    ny = _number(sec, "ny", "geometry", required=False, default=d.ny, kind=int)
    if nx < 1:
        raise ConfigError("geometry.nx", "must be at least 1")
    if ny < 1:
        raise ConfigError("geometry.ny", "must be at least 1")
    g0 = _parse_region(sec["gamma0"], "geometry.gamma0") if "gamma0" in sec else d.gamma0
    if g0.stop <= g0.start:
        raise ConfigError("geometry.gamma0", "must have positive length")
    if "gamma1" in sec:
        raw = sec["gamma1"]
        g1 = None if raw in ("none", {}) else _parse_region(raw, "geometry.gamma1")
    else:
        g1 = d.gamma1
    diagonal = sec.get("diagonal", d.diagonal)
    if diagonal not in ("right", "left", "alternating"):
        raise ConfigError("geometry.diagonal", f"unknown diagonal {diagonal!r}")
    try:
        BoundarySpec(
            BoundaryRegion(g0.side, g0.start, g0.stop),
            None if g1 is None else BoundaryRegion(g1.side, g1.start, g1.stop),
        )
    except ValueError as exc:
        raise ConfigError("geometry", str(exc)) from None
    return GeometrySection(width, height, nx, ny, g0, g1, diagonal)


def _parse_percussion(doc) -> PercussionSection:
    sec = _section(doc, "percussion")
    _check_unknown(sec, ("magnitude", "angle_deg"), "percussion")
    mag = _number(sec, "magnitude", "percussion")
    _nonnegative(mag, "percussion.magnitude")
    angle = _number(sec, "angle_deg", "percussion", required=False, default=90.0)
    if not 0.0 <= angle <= 180.0:
        raise ConfigError("percussion.angle_deg", f"must lie in [0, 180], got {angle}")
    return PercussionSection(mag, angle)


def _parse_initial(doc) -> InitialSection:
    sec = _section(doc, "initial")
    _check_unknown(sec, ("T_minus", "beta_minus"), "initial")
    T = _number(sec, "T_minus", "initial")
    _positive(T, "initial.T_minus")
    beta = sec.get("beta_minus", [0.5, 0.5, 0.0])
    if not isinstance(beta, list) or len(beta) != 3:
        raise ConfigError("initial.beta_minus", "expected three fractions")
    if any(isinstance(b, bool) or not isinstance(b, (int, float)) for b in beta):
        raise ConfigError("initial.beta_minus", "fractions must be numbers")
    beta = tuple(float(b) for b in beta)
    if any(b < 0.0 or b > 1.0 for b in beta):
        raise ConfigError("initial.beta_minus", "fractions must lie in [0, 1]")
    if abs(sum(beta) - 1.0) > 1e-12:
        raise ConfigError("initial.beta_minus", f"fractions must sum to 1, got {sum(beta)!r}")
    return InitialSection(T, beta)


def _parse_thermal(doc) -> ThermalSection:
    sec = _section(doc, "thermal_bc", required=False)
    _check_unknown(sec, ("kind", "h_coeff", "T_ext"), "thermal_bc")
    kind = sec.get("kind", ADIABATIC)
    if kind not in (ADIABATIC, ROBIN):
        raise ConfigError("thermal_bc.kind", f"expected {ADIABATIC!r} or {ROBIN!r}, got {kind!r}")
    h = _number(sec, "h_coeff", "thermal_bc", required=False, default=0.0)
    T_ext = _number(sec, "T_ext", "thermal_bc", required=kind == ROBIN, default=0.0)
    if kind == ROBIN:
        _nonnegative(h, "thermal_bc.h_coeff")
        _positive(T_ext, "thermal_bc.T_ext")
    return ThermalSection(kind, h, T_ext)


def _parse_solver(doc) -> SolverSection:
    sec = _section(doc, "solver", required=False)
    d = SolverSection()
    _check_unknown(sec, [f.name for f in fields(SolverSection)], "solver")
    out = SolverSection(
        fp_tol=_number(sec, "fp_tol", "solver", required=False, default=d.fp_tol),
        fp_max_iter=_number(sec, "fp_max_iter", "solver", required=False, default=d.fp_max_iter, kind=int),
        relaxation=_number(sec, "relaxation", "solver", required=False, default=d.relaxation),
        lin_tol=_number(sec, "lin_tol", "solver", required=False, default=d.lin_tol),
        vi_tol=_number(sec, "vi_tol", "solver", required=False, default=d.vi_tol),
    )
    for k in ("fp_tol", "lin_tol", "vi_tol"):
        _positive(getattr(out, k), f"solver.{k}")
    if out.fp_max_iter < 1:
        raise ConfigError("solver.fp_max_iter", "must be at least 1")
    if not 0.0 < out.relaxation <= 1.0:
        raise ConfigError("solver.relaxation", "must lie in (0, 1]")
    return out


def parse_config(doc: dict) -> RunConfig:
    _check_unknown(doc, ("material", "geometry", "percussion", "initial", "thermal_bc", "solver"), "config")
    return RunConfig(
        material=_parse_material(doc),
        geometry=_parse_geometry(doc),
        percussion=_parse_percussion(doc),
        initial=_parse_initial(doc),
        thermal_bc=_parse_thermal(doc),
        solver=_parse_solver(doc),
    )


def load_config(path) -> RunConfig:
    """Read and validate a TOML run file; errors name the offending key."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"TOML parse error: {exc}") from None
    return parse_config(doc)


def config_to_dict(cfg: RunConfig) -> dict:
    doc = asdict(cfg)
    mat = doc["material"]
    mat["lambda"] = mat.pop("lam")
    doc["initial"]["beta_minus"] = list(cfg.initial.beta_minus)
    geo = doc["geometry"]
    if geo["gamma1"] is None:
        geo["gamma1"] = "none"
    return doc


def dump_config(cfg: RunConfig, path=None) -> str:
    """Serialize to TOML; writes ``path`` when given and returns the text."""
    text = tomli_w.dumps(config_to_dict(cfg))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
