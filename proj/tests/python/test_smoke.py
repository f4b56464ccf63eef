import numpy as np
import pytest

import hankelrec as hr


def test_shape_and_lift():
    s = hr.make_shape(5)
    assert (s.n1, s.n2) == (3, 3)
    assert list(s.weights) == [1, 2, 3, 2, 1]
    z = np.arange(5, dtype=complex)
    H = hr.hankel_dense(z, s)
    assert np.array_equal(H, [[0, 1, 2], [1, 2, 3], [2, 3, 4]])
    assert np.allclose(hr.hankel_matvec(z, np.ones(3, dtype=complex), s), [3, 6, 9])


def test_fast_products_match_numpy():
    rng = np.random.default_rng(0)
    s = hr.make_shape(64)
    z = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    u = rng.standard_normal(s.n1) + 1j * rng.standard_normal(s.n1)
    H = hr.hankel_dense(z, s)
    assert np.allclose(hr.hankel_matvec_adjoint(z, u, s), H.conj().T @ u)
    U, sv, Vh = np.linalg.svd(H, full_matrices=False)
    assert np.allclose(hr.pseudo_inverse(U, sv, Vh.conj().T, s), z)


def test_recovery_round_trip():
    x, modes = hr.generate_signal(127, 4, min_separation=1.5 / 127, seed=3)
    assert len(modes) == 4
    idx = hr.sample_indices(127, 64, seed=4)
    res = hr.solve(x[idx], idx, 127, 4)
    assert res["converged"]
    assert np.linalg.norm(res["x_rec"] - x) <= 1e-3 * np.linalg.norm(x)


def test_partial_svd():
    x = hr.make_signal(40, [(0.1, 0.0, 1.0), (0.6, 0.01, 2.0 + 1.0j)])
    U, sv, V = hr.partial_svd(x, 2)
    dense = np.linalg.svd(hr.hankel_dense(x, hr.make_shape(40)), compute_uv=False)
    assert np.allclose(sv, dense[:2])


def test_nd_solve():
    dims = [6, 6, 8]
    x = hr.nd_generate_signal(dims, 2, seed=1)
    idx = hr.sample_indices(x.size, 120, seed=2)
    res = hr.nd_solve(x[idx], idx, dims, 2)
    assert np.linalg.norm(res["x_rec"] - x) <= 1e-4 * np.linalg.norm(x)


def test_errors_become_python_exceptions():
    with pytest.raises(ValueError):
        hr.solve(np.zeros(3, dtype=complex), [0, 1, 2], 10, 0)
    with pytest.raises(ValueError):
        hr.sample_indices(5, 6)


def test_phase_cell():
    assert hr.phase_cell(127, 96, 1, trials=5) == 1.0
