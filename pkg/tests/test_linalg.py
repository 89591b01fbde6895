import numpy as np
import pytest
import scipy.sparse as sp

from sma_collision.errors import SolverError
from sma_collision.linalg import DirectSolver, apply_dirichlet, solve_spd


def test_identity_one_iteration():
    b = np.array([1.0, -2.0, 3.5])
    x, rep = solve_spd(sp.identity(3), b)
    assert np.allclose(x, b) and rep.iterations == 1 and rep.converged


def test_two_by_two():
    x, rep = solve_spd(np.array([[4.0, 1.0], [1.0, 3.0]]), np.array([1.0, 2.0]))
    assert np.allclose(x, [1 / 11, 7 / 11], rtol=1e-10)
    assert rep.converged and rep.final_residual <= 1e-10


def test_zero_rhs():
    x, rep = solve_spd(sp.identity(4), np.zeros(4))
    assert not x.any() and rep.iterations == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_spd(sp.identity(3), np.ones(2))


def test_indefinite_breakdown():
    A = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(SolverError):
        solve_spd(A, np.array([1.0, -1.0]))


def test_random_spd_against_dense(rng):
    for n in (5, 20, 50):
        B = rng.standard_normal((n, n))
        A = B @ B.T + n * np.eye(n)
        b = rng.standard_normal(n)
        x, rep = solve_spd(A, b)
        ref = np.linalg.solve(A, b)
        assert np.linalg.norm(x - ref) <= 1e-9 * np.linalg.norm(ref)
        assert rep.converged


def test_report_respects_tolerance(rng):
    n = 30
    B = rng.standard_normal((n, n))
    A = B @ B.T + np.eye(n)
    b = rng.standard_normal(n)
    x, rep = solve_spd(A, b, tol=1e-6)
    assert rep.converged == (rep.final_residual <= 1e-6)
    assert np.linalg.norm(b - A @ x) / np.linalg.norm(b) <= 1e-6


def test_not_converged_flag():
    n = 50
    A = sp.diags([np.full(n - 1, -1.0), np.full(n, 2.0), np.full(n - 1, -1.0)], [-1, 0, 1])
    _, rep = solve_spd(A, np.ones(n), max_iter=2)
    assert not rep.converged and rep.iterations == 2


def test_dirichlet_all_fixed():
    A = sp.csr_matrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
    A2, b2 = apply_dirichlet(A, np.array([3.0, 3.0]), {0: 0.0, 1: 0.0})
    assert np.array_equal(A2.toarray(), np.eye(2)) and not b2.any()


def test_dirichlet_substitution():
    A2, b2 = apply_dirichlet(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([3.0, 3.0]), {0: 1.0})
    x, _ = solve_spd(A2, b2)
    assert x[0] == 1.0 and x[1] == pytest.approx(1.0)
    assert abs(A2 - A2.T).max() == 0


def test_dirichlet_empty():
    A = sp.csr_matrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
    b = np.array([1.0, 2.0])
    A2, b2 = apply_dirichlet(A, b, {})
    assert (A2 != A).nnz == 0 and np.array_equal(b2, b)


def test_direct_solver():
    A = sp.csc_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
    assert np.allclose(DirectSolver(A).solve(np.array([1.0, 2.0])), [1 / 11, 7 / 11])
