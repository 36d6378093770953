import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pd
from kbf.beamformer import (
    SlidingScm,
    angle_grid,
    capon_power,
    mpdr_weights,
    quiescent_beampattern,
    scanned_response,
    steering_matrix,
    steering_vector,
    wng,
)
from kbf.scenario import covariances


def test_broadside_is_all_ones():
    assert np.array_equal(steering_vector(90.0, 15).d, np.ones(15, dtype=complex))


def test_sixty_degrees_two_elements():
    # phase -2 pi * 0.5 * 1 * cos(60) = -pi/2
    d = steering_vector(60.0, 2).d
    assert np.allclose(d, [1.0, np.exp(-1j * np.pi / 2)], atol=1e-15)
    assert np.allclose(d, [1.0, -1j], atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 180), st.integers(1, 64), st.floats(0.1, 1.0))
def test_unit_modulus(angle, M, spacing):
    d = steering_vector(angle, M, spacing).d
    assert np.allclose(np.abs(d), 1.0, atol=1e-15)
    assert abs(np.vdot(d, d).real - M) <= 1e-12 * M


def test_angle_range_checked():
    with pytest.raises(ValueError):
        steering_vector(181.0, 4)


def test_angle_grid():
    g = angle_grid(1.0)
    assert g[0] == 0.0 and g[-1] == 180.0 and g.size == 181


# --- sliding SCM

def test_single_push_outer_product(rng):
    y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    s = SlidingScm(5, 10).push(y)
    assert np.allclose(s.R, np.outer(y, y.conj()))


def test_window_matches_batch(rng):
    M, L = 6, 9
    Y = rng.standard_normal((40, M)) + 1j * rng.standard_normal((40, M))
    s = SlidingScm(M, L)
    for t in range(40):
        s.push(Y[t])
        held = Y[max(0, t + 1 - L): t + 1]
        ref = held.T @ held.conj() / held.shape[0]
        assert np.max(np.abs(s.R - ref)) <= 1e-10 * np.max(np.abs(ref))
    assert np.allclose(s.snapshots(), Y[-L:])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 20), st.integers(1, 300), st.integers(0, 2**32 - 1),
       st.sampled_from([0, 7, 1024]))
def test_sliding_equals_batch_property(M, L, n, seed, every):
    r = np.random.default_rng(seed)
    Y = (r.standard_normal((n, M)) + 1j * r.standard_normal((n, M))) * r.uniform(0.1, 10, (n, 1))
    s = SlidingScm(M, L, recompute_every=every)
    for y in Y:
        s.push(y)
    held = Y[-L:]
    ref = held.T @ held.conj() / held.shape[0]
    R = s.R
    assert np.max(np.abs(R - ref)) <= 1e-10 * np.max(np.abs(ref))
    assert np.allclose(R, R.conj().T, atol=1e-12 * np.max(np.abs(ref)))
    assert np.linalg.eigvalsh(R)[0] >= -1e-10 * np.trace(R).real


def test_push_shape_checked():
    with pytest.raises(ValueError):
        SlidingScm(3, 2).push(np.ones(4))


# --- MPDR weights

def test_white_noise_weights():
    d = steering_vector(70.0, 15)
    assert np.allclose(mpdr_weights(np.eye(15), d).w, d.d / 15)


def test_diagonal_closed_form(rng):
    q = rng.uniform(0.5, 4.0, 8)
    d = steering_vector(40.0, 8).d
    ref = (d / q) / np.sum(1 / q)
    assert np.allclose(mpdr_weights(np.diag(q).astype(complex), d).w, ref, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.floats(0, 180), st.floats(0, 10), st.integers(0, 2**32 - 1))
def test_distortionless(M, angle, mu, seed):
    r = np.random.default_rng(seed)
    B = r.standard_normal((M, 2 * M)) + 1j * r.standard_normal((M, 2 * M))
    Q = B @ B.conj().T / (2 * M) + (mu + 1e-3) * np.eye(M)
    d = steering_vector(angle, M)
    w = mpdr_weights(Q, d).w
    assert abs(np.vdot(w, d.d) - 1) <= 1e-12 * max(1.0, np.linalg.cond(Q) * 1e-3)
    lin, _ = wng(w)
    assert lin <= M * (1 + 1e-9)


def test_wng_of_conventional_weights():
    d = steering_vector(90.0, 15).d
    lin, db = wng(d / 15)
    assert lin == pytest.approx(15.0)
    assert round(db, 2) == 11.76
    for M in (1, 4, 33):
        assert wng(np.ones(M) / M)[0] == pytest.approx(M)


# --- quiescent pattern

def dirichlet_db(M, theta_deg):
    x = np.pi * 0.5 * np.cos(np.deg2rad(theta_deg))
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.abs(np.sin(M * x) / (M * np.sin(x)))
    g = np.where(np.abs(np.sin(x)) < 1e-300, 1.0, g)
    return 20 * np.log10(g)


def test_target_response_zero_db():
    d = steering_vector(90.0, 15)
    assert quiescent_beampattern(d, 90.0) == pytest.approx(0.0, abs=1e-12)


def test_pattern_matches_dirichlet_kernel():
    d = steering_vector(90.0, 15)
    th = np.linspace(0.3, 179.7, 2001)
    th = th[np.abs(th - 90) > 1e-6]
    got = quiescent_beampattern(d, th)
    ref = dirichlet_db(15, th)
    finite = np.isfinite(ref) & (ref > -200)
    assert np.max(np.abs(got[finite] - ref[finite])) <= 1e-10 * 1e3


def test_first_sidelobe_level():
    # numeric maximisation of the kernel between its first and second nulls
    M = 15
    u = np.linspace(2 / M, 4 / M, 200001)[1:-1]  # u = cos(theta), nulls at 2/M, 4/M
    x = np.pi * 0.5 * u
    peak = 20 * np.log10(np.max(np.abs(np.sin(M * x) / (M * np.sin(x)))))
    theta = np.rad2deg(np.arccos(u[np.argmax(np.abs(np.sin(M * x) / (M * np.sin(x))))]))
    assert -13.4 < peak < -12.9
    assert quiescent_beampattern(steering_vector(90.0, M), theta) == pytest.approx(peak, abs=1e-6)


# --- Capon scan

def test_capon_white_noise():
    D = steering_matrix(angle_grid(5.0), 9)
    assert np.allclose(capon_power(np.eye(9), D), 1 / 9)


def test_capon_single_source_peak():
    M = 15
    grid = angle_grid(0.5)
    for src in (37.0, 90.0, 121.5):
        d0 = steering_vector(src, M).d
        Q = 10.0 * np.outer(d0, d0.conj()) + np.eye(M)
        _, db = scanned_response(Q, grid)
        assert grid[np.argmax(db)] == src
        assert db.max() == 0.0


def three_largest_peaks(angles, p):
    interior = np.flatnonzero((p[1:-1] >= p[:-2]) & (p[1:-1] >= p[2:])) + 1
    idx = interior[np.argsort(p[interior])[::-1][:3]]
    return np.sort(angles[idx])


def test_true_covariance_scan_peaks():
    M = 15
    d_t = steering_vector(90.0, M).d
    R_y, _ = covariances(M, 0.5, d_t, 10 ** -0.5, 10 ** 0.7, (60.0, 120.0))
    grid = angle_grid(1.0)
    _, db = scanned_response(R_y, grid)
    assert np.allclose(three_largest_peaks(grid, db), [60, 90, 120], atol=1.0)


def test_capon_matches_direct_inverse(rng):
    Q = random_pd(rng, 7)
    D = steering_matrix(np.array([10.0, 80.0, 150.0]), 7)
    ref = 1 / np.einsum("ij,ij->j", D.conj(), np.linalg.solve(Q, D)).real
    assert np.allclose(capon_power(Q, D), ref, rtol=1e-12)
    assert math.isclose(scanned_response(Q, [10.0])[1][0], 0.0)
