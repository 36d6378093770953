import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_pd, random_psd_lowrank
from kbf.errors import NotPositiveDefiniteError
from kbf.linalg import (
    OpCounter,
    RealSymTridiagonal,
    as_hermitian,
    cholesky_pd,
    full_evd,
    gershgorin_bounds,
    matvec,
    solve_pd,
    trace_bounds,
    tridiag_eigenvalues,
)


def naive_matvec(A, x):
    n = A.shape[0]
    out = [0j] * n
    for i in range(n):
        for j in range(n):
            out[i] += complex(A[i, j]) * complex(x[j])
    return np.array(out)


# --- hermitian matrix construction

def test_as_hermitian_zeroes_diagonal_imag():
    A = np.array([[1 + 1e-14j, 2 - 1j], [2 + 1j, 3]])
    H = as_hermitian(A)
    assert np.all(H.diagonal().imag == 0.0)


def test_as_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError):
        as_hermitian(np.array([[1, 2], [3, 4]], dtype=complex))


def test_as_hermitian_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_hermitian(np.array([[np.nan, 0], [0, 1]], dtype=complex))


# --- matvec

def test_matvec_identity():
    x = np.array([1 + 2j, -3, 0.5j])
    assert np.array_equal(matvec(np.eye(3), x), x)


def test_matvec_diagonal():
    assert np.allclose(matvec(np.diag([1.0, 2.0, 3.0]), np.ones(3)), [1, 2, 3])


def test_matvec_against_double_loop(kernels, rng):
    A = random_hermitian(rng, 4)
    x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    ref = naive_matvec(A, x)
    got = kernels.matvec(A, x)
    assert np.max(np.abs(got - ref)) <= 1e-13 * np.max(np.abs(ref))


def test_matvec_counts_products():
    c = OpCounter()
    A = np.eye(3)
    for _ in range(3):
        matvec(A, np.ones(3), counter=c)
    assert c.matvecs == 3


def test_matvec_shape_mismatch():
    with pytest.raises(ValueError):
        matvec(np.eye(3), np.ones(2))


# --- solve

def test_solve_identity_and_scalar():
    b = np.array([1.0, -2j, 3])
    assert np.allclose(solve_pd(np.eye(3), b), b)
    assert np.allclose(solve_pd(2 * np.eye(3), b), b / 2)


def test_solve_residual(kernels, rng):
    A = random_pd(rng, 12)
    b = rng.standard_normal((12, 2)) + 1j * rng.standard_normal((12, 2))
    L, ok = kernels.cholesky(A)
    assert ok
    x = kernels.chol_solve(L, np.ascontiguousarray(b))
    r = A @ x - b
    assert np.linalg.norm(r) <= 1e-10 * np.linalg.norm(b)


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_pd(np.diag([1.0, -1.0]).astype(complex))


def test_cholesky_rejects_singular(rng):
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_pd(random_psd_lowrank(rng, 6, 2))


def test_chol_quadform(kernels, rng):
    A = random_pd(rng, 9)
    D = rng.standard_normal((9, 3)) + 1j * rng.standard_normal((9, 3))
    L, _ = kernels.cholesky(A)
    ref = np.einsum("ij,ij->j", D.conj(), np.linalg.solve(A, D)).real
    assert np.allclose(kernels.chol_quadform(L, np.ascontiguousarray(D)), ref, rtol=1e-10)


# --- full eigendecomposition

def test_evd_diagonal():
    assert np.allclose(full_evd(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])


def test_evd_rank_one_steering():
    d = np.exp(1j * np.linspace(0, 2, 15))
    w = full_evd(np.outer(d, d.conj()))
    assert abs(w[-1] - 15) <= 1e-12 * 15
    assert np.max(np.abs(w[:-1])) <= 1e-12 * 15


@pytest.mark.parametrize("M", [1, 2, 6, 15, 40])
def test_evd_trace_and_residuals(kernels, rng, M):
    A = random_hermitian(rng, M)
    w, V, ok = kernels.hermitian_eigh(A)
    assert ok
    assert abs(w.sum() - np.trace(A).real) <= 1e-12 * max(1.0, np.abs(w).sum())
    nrm = np.linalg.norm(A, 2)
    for j in range(M):
        assert np.linalg.norm(A @ V[:, j] - w[j] * V[:, j]) <= 1e-11 * nrm
    assert np.allclose(V.conj().T @ V, np.eye(M), atol=1e-12)


def test_evd_values_match_lapack(kernels, rng):
    A = random_hermitian(rng, 30)
    ref = np.linalg.eigvalsh(A)
    w, ok = kernels.hermitian_eigvalsh(A)
    assert ok
    assert np.max(np.abs(w - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_full_evd_vectors():
    A = np.array([[2, 1j], [-1j, 2]])
    w, V = full_evd(A, vectors=True)
    assert np.allclose(w, [1, 3])
    assert np.allclose(A @ V, V * w)


# --- tridiagonal

def test_tridiag_rejects_negative_beta():
    with pytest.raises(ValueError):
        RealSymTridiagonal([1.0, 2.0], [-0.5])


def test_tridiag_rejects_bad_length():
    with pytest.raises(ValueError):
        RealSymTridiagonal([1.0, 2.0], [0.5, 0.5])


def test_tridiag_one_by_one():
    assert np.allclose(tridiag_eigenvalues(RealSymTridiagonal([1.0], [])), [1.0])


def test_tridiag_two_by_two():
    # det([[1.5 - x, 0.5], [0.5, 1.5 - x]]) = (1.5 - x)^2 - 0.25 -> x = 1, 2
    w = tridiag_eigenvalues(RealSymTridiagonal([1.5, 1.5], [0.5]))
    assert np.allclose(w, [1.0, 2.0], atol=1e-14)


def test_tridiag_random_against_dense(kernels, rng):
    a = rng.standard_normal(8)
    b = np.abs(rng.standard_normal(7))
    dense = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
    ref = np.linalg.eigvalsh(dense)
    assert np.max(np.abs(kernels.tridiag_eigvals(a, b) - ref)) <= 1e-11


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.floats(-6, 6))
def test_tridiag_extremes_property(k, seed, logscale):
    from kbf.linalg import _k

    r = np.random.default_rng(seed)
    a = r.standard_normal(k) * 10.0 ** logscale
    b = np.abs(r.standard_normal(k - 1)) * 10.0 ** logscale
    b[r.random(k - 1) < 0.2] = 0.0  # decoupled blocks
    ref = np.linalg.eigvalsh(np.diag(a) + np.diag(b, 1) + np.diag(b, -1))
    lo, hi = _k.tridiag_extremes(a, b)
    scale = np.max(np.abs(ref)) or 1.0
    assert abs(lo - ref[0]) <= 1e-12 * scale
    assert abs(hi - ref[-1]) <= 1e-12 * scale


# --- cheap bounds

def test_gershgorin_zero_radii():
    sb = gershgorin_bounds(np.diag([1.0, 5.0]))
    assert (sb.lower, sb.upper) == (1.0, 5.0)


def test_gershgorin_two_by_two():
    sb = gershgorin_bounds(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert (sb.lower, sb.upper) == (1.0, 3.0)


def test_trace_bounds_small():
    assert (trace_bounds(np.eye(3)).lower, trace_bounds(np.eye(3)).upper) == (0.0, 3.0)
    sb = trace_bounds(np.diag([1.0, 2.0, 3.0]))
    assert (sb.lower, sb.upper) == (0.0, 6.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 15), st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_bounds_enclose_spectrum(M, rank, seed):
    r = np.random.default_rng(seed)
    A = random_psd_lowrank(r, M, min(rank, M))
    w = np.linalg.eigvalsh(A)
    tol = 1e-12 * max(1.0, w[-1])
    g = gershgorin_bounds(A)
    t = trace_bounds(A)
    assert g.lower >= 0.0 and g.lower <= w[0] + tol and g.upper >= w[-1] - tol
    assert t.lower == 0.0 and t.upper >= w[-1] - tol


def test_raw_gershgorin_matches_definition(kernels, rng):
    A = random_hermitian(rng, 7)
    rad = np.abs(A).sum(axis=1) - np.abs(np.diag(A))
    lo, hi = kernels.gershgorin(A)
    assert np.isclose(lo, np.min(A.diagonal().real - rad))
    assert np.isclose(hi, np.max(A.diagonal().real + rad))
