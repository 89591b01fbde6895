import copy
import sys

import pytest

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from sma_collision.config import dump_config, load_config, parse_config
from sma_collision.errors import ConfigError
from sma_collision.thermal import ROBIN


@pytest.fixture
def doc(fig1_path):
    return tomllib.loads(fig1_path.read_text())


def test_fig1_loads_and_converts(fig1_path):
    cfg = load_config(fig1_path)
    p = cfg.material_params()
    assert p.rho == 6500.0 and p.k_v == 1e6 and p.c == 4e6
    assert p.C == 5.4e6 and p.l_a == 80e6 and p.T0 == 332.75 and p.lam == 18.0
    assert p.upsilon == 0.5 and p.kappa == 0.5
    assert cfg.load().magnitude == 20e6
    assert cfg.initial.T_minus == pytest.approx(0.9 * p.T0)
    mesh = cfg.build_mesh()
    assert mesh.width == pytest.approx(1e-3) and mesh.n_triangles == 2 * 100 * 100


def test_beta_sum_rejected(doc):
    doc["initial"]["beta_minus"] = [0.5, 0.5, 0.1]
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    assert err.value.key == "initial.beta_minus"


def test_solver_defaults(doc):
    del doc["solver"]
    cfg = parse_config(doc)
    assert cfg.solver.fp_tol == 1e-8 and cfg.solver.lin_tol == 1e-10
    assert cfg.fixed_point().max_iter == 200


@pytest.mark.parametrize(
    "mutate, key",
    [
        (lambda d: d["material"].pop("k_v"), "material.k_v"),
        (lambda d: d["material"].update(C=-1.0), "material.C"),
        (lambda d: d["material"].update(c="four"), "material.c"),
        (lambda d: d["material"].update(variant="Bogus"), "material.variant"),
        (lambda d: d["material"].update(colour=1), "material.colour"),
        (lambda d: d["percussion"].update(angle_deg=200.0), "percussion.angle_deg"),
        (lambda d: d["geometry"].update(nx=0), "geometry.nx"),
        (lambda d: d["geometry"].update(nx=2.5), "geometry.nx"),
        (lambda d: d["geometry"]["gamma1"].update(side="middle"), "geometry.gamma1.side"),
        (lambda d: d["solver"].update(relaxation=0.0), "solver.relaxation"),
        (lambda d: d["thermal_bc"].update(kind=ROBIN, h_coeff=1.0), "thermal_bc.T_ext"),
        (lambda d: d.pop("percussion"), "percussion"),
    ],
)
def test_errors_name_the_key(doc, mutate, key):
    mutate(doc)
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    assert err.value.key == key
    assert str(err.value).startswith(key)


def test_bad_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[material\nrho = 1")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_round_trip(fig1_path, tmp_path):
    cfg = load_config(fig1_path)
    path = tmp_path / "again.toml"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_round_trip_without_gamma1(doc, tmp_path):
    doc = copy.deepcopy(doc)
    doc["geometry"]["gamma1"] = "none"
    doc["thermal_bc"] = {"kind": ROBIN, "h_coeff": 25.0, "T_ext": 295.0}
    cfg = parse_config(doc)
    assert cfg.geometry.gamma1 is None and cfg.boundary_spec().gamma1 is None
    assert parse_config(tomllib.loads(dump_config(cfg))) == cfg
