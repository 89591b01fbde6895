import numpy as np
import pytest

from sma_collision.closedform import ClosedFormInput, solve_0d
from sma_collision.config import load_config
from sma_collision.coupling import FixedPointConfig, ProbeData, solve_collision, stability_probe
from sma_collision.errors import SolverError
from sma_collision.mesh import GAMMA0, GAMMA1, build_structured_mesh
from sma_collision.params import MaterialParams, PreState
from sma_collision.phase import complementarity_residual, feasibility_violation
from sma_collision.velocity import PercussionLoad

P = MaterialParams.niti()
PRE = PreState(0.9 * P.T0, (0.5, 0.5, 0.0))
TIGHT = FixedPointConfig(tol=1e-11)


@pytest.fixture(scope="module")
def fig1(fig1_path):
    cfg = load_config(fig1_path)
    mesh = cfg.build_mesh()
    res = solve_collision(mesh, cfg.material_params(), cfg.pre_state(), cfg.load(), cfg.thermal(), cfg.fixed_point())
    return mesh, res


def test_fixed_point_config_validation():
    for bad in ({"tol": 0.0}, {"relaxation": 0.0}, {"relaxation": 1.5}, {"max_iter": 0}):
        with pytest.raises(ValueError):
            FixedPointConfig(**bad)


def test_zero_load_changes_nothing():
    mesh = build_structured_mesh(6, 6, 1e-3, 1e-3)
    res = solve_collision(mesh, P, PRE, PercussionLoad(0.0))
    assert res.converged
    assert np.all(res.U_plus == 0.0)
    assert np.allclose(res.T_plus, PRE.T_minus, rtol=1e-12)
    assert np.allclose(res.beta_plus, [0.5, 0.5, 0.0], atol=1e-12)


@pytest.mark.parametrize("n", [1, 4, 16])
@pytest.mark.parametrize("diss", [1e8, 2.5e8, 3.4e8, 5e8])
def test_prescribed_work_matches_closed_form(n, diss):
    mesh = build_structured_mesh(n, n, 1e-3, 1e-3)
    res = solve_collision(mesh, P, PRE, PercussionLoad(0.0), fp=TIGHT, prescribed_diss=diss)
    ref = solve_0d(ClosedFormInput.from_params(P, PRE.T_minus, PRE.beta_minus, diss))
    assert res.converged
    assert np.max(np.abs(res.T_plus - ref.T_plus)) <= 1e-8 * ref.T_plus
    assert np.max(np.abs(res.beta_plus - np.array(ref.beta_plus))) <= 1e-8


def test_prescribed_work_rejects_negative():
    mesh = build_structured_mesh(2, 2, 1e-3, 1e-3)
    with pytest.raises(ValueError):
        solve_collision(mesh, P, PRE, PercussionLoad(0.0), prescribed_diss=-np.ones(mesh.n_triangles))


def test_fig1_structure(fig1):
    mesh, res = fig1
    assert res.converged
    assert np.abs(res.U_plus).max() > 0.0
    b = res.beta_plus
    assert np.max(np.abs(b.sum(axis=1) - 1.0)) <= 1e-12
    assert feasibility_violation(b[:, 1:]) <= 1e-12
    assert np.max(np.abs(b[:, 0] - b[:, 1])) <= 1e-9
    hot = int(np.argmax(res.T_plus))
    assert hot in set(mesh.tag_nodes(GAMMA0)) | set(mesh.tag_nodes(GAMMA1))


def test_fig1_update_norms_non_increasing(fig1):
    _, res = fig1
    norms = np.maximum(res.diagnostics.update_T, res.diagnostics.update_beta)
    assert np.all(np.diff(norms[1:]) <= 0.0)


def test_fig1_complementarity(fig1):
    _, res = fig1
    xi = res.reactions.stacked
    chi = res.beta_plus[:, 1:]
    assert complementarity_residual(chi, xi) <= 1e-8 * (1.0 + np.abs(xi).max())


@pytest.fixture(scope="module")
def hard_case():
    # a stroke strong enough to produce austenite near the support
    mesh = build_structured_mesh(24, 24, 1e-3, 1e-3)
    return mesh, PercussionLoad.from_degrees(35e6, 60.0)


def test_uniqueness_from_two_starts(hard_case):
    mesh, load = hard_case
    fp = FixedPointConfig(tol=1e-9)
    a = solve_collision(mesh, P, PRE, load, fp=fp, beta3_guess=0.0)
    b = solve_collision(mesh, P, PRE, load, fp=fp, beta3_guess=1.0)
    assert a.converged and b.converged
    assert a.beta_plus[:, 2].max() > 0.0
    dT = np.max(np.abs(a.T_plus - b.T_plus) / (1.0 + np.abs(a.T_plus)))
    assert dT <= 10 * fp.tol
    assert np.max(np.abs(a.beta_plus - b.beta_plus)) <= 10 * fp.tol


def test_iteration_limit_reports_non_convergence(hard_case):
    mesh, load = hard_case
    res = solve_collision(mesh, P, PRE, load, fp=FixedPointConfig(max_iter=1))
    assert not res.converged and res.diagnostics.iterations == 1
    # the returned fractions are still admissible
    assert feasibility_violation(res.beta_plus[:, 1:]) <= 1e-12


def test_stability_probe_guard():
    mesh = build_structured_mesh(4, 4, 1e-3, 1e-3)
    d = ProbeData(PercussionLoad.from_degrees(20e6, 60.0))
    with pytest.raises(ValueError):
        stability_probe(mesh, P, PRE, d, d)


def test_stability_probe_non_convergence():
    mesh = build_structured_mesh(8, 8, 1e-3, 1e-3)
    a = ProbeData(PercussionLoad.from_degrees(35e6, 60.0))
    b = ProbeData(PercussionLoad.from_degrees(36e6, 60.0))
    with pytest.raises(SolverError):
        stability_probe(mesh, P, PRE, a, b, fp=FixedPointConfig(max_iter=1))


def _ratios(mesh, make):
    return np.array([stability_probe(mesh, P, PRE, *make(eps)) for eps in (1e-2, 1e-3, 1e-4)])


def test_stability_percussion_perturbation(hard_case):
    mesh, load = hard_case
    g = load.magnitude

    def make(eps):
        return (
            ProbeData(PercussionLoad(g, load.angle)),
            ProbeData(PercussionLoad(g * (1 + eps), load.angle)),
        )

    r = _ratios(mesh, make)
    assert np.all(np.isfinite(r)) and np.all(r > 0)
    assert r.max() <= 1.5 * r.min()


def test_stability_heat_source_perturbation(hard_case):
    mesh, load = hard_case

    def make(eps):
        return ProbeData(load, f=0.0), ProbeData(load, f=eps * 1e8)

    r = _ratios(mesh, make)
    assert np.all(np.isfinite(r)) and np.all(r > 0)
    assert r.max() <= 1.5 * r.min()
