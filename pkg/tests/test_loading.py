import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pd, random_psd_lowrank
from kbf.errors import InfeasibleLoadingError
from kbf.loading import (
    LoadingPolicy,
    compute_loading,
    default_wng_floor_db,
    kappa_max_from_wng,
    loaded,
    required_loading,
    wng_floor_from_kappa,
)


def kappa_closed_form(a_g):
    return (2 * a_g - 1) + 2 * math.sqrt(a_g * (a_g - 1))


# --- Kantorovich floor

def test_floor_perfect_conditioning():
    assert wng_floor_from_kappa(1.0, 15) == 15.0


def test_floor_limits():
    assert wng_floor_from_kappa(math.inf, 15) == 0.0
    assert wng_floor_from_kappa(1e6, 15) == pytest.approx(6.0e-5, rel=1e-3)


def test_floor_kappa_three():
    assert wng_floor_from_kappa(3.0, 8) == pytest.approx(8 * 12 / 16)


def test_floor_kappa_three_monte_carlo(rng):
    # random PD matrices with condition exactly 3: no MPDR weight beats the floor
    M = 8
    worst = np.inf
    for _ in range(300):
        U, _ = np.linalg.qr(rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M)))
        lam = np.concatenate([[1.0, 3.0], rng.uniform(1.0, 3.0, M - 2)])
        Q = (U * lam) @ U.conj().T
        d = np.exp(1j * rng.uniform(0, 2 * np.pi, M))
        u = np.linalg.solve(Q, d)
        w = u / np.vdot(d, u)
        worst = min(worst, 1.0 / np.vdot(w, w).real)
    assert worst >= wng_floor_from_kappa(3.0, M) * (1 - 1e-12)


def test_floor_rejects_kappa_below_one():
    with pytest.raises(ValueError):
        wng_floor_from_kappa(0.5, 4)


# --- WNG floor -> kappa cap

def test_full_wng_demands_identity_conditioning():
    b = kappa_max_from_wng(10 * math.log10(15), 15)
    assert b.array_gain_limit == 1.0 and b.kappa_max == 1.0


def test_default_floor_m15():
    w_db = 10 * math.log10(15) - 3
    a_g = 15 / 10 ** (w_db / 10)  # = 10^0.3
    kappa = kappa_closed_form(a_g)
    b = kappa_max_from_wng(w_db, 15)
    assert b.array_gain_limit == pytest.approx(10 ** 0.3, rel=1e-14)
    assert b.kappa_max == pytest.approx(kappa, rel=1e-12)
    assert round(b.array_gain_limit, 4) == 1.9953 and round(b.kappa_max, 4) == 5.8089
    assert 4 * b.kappa_max / (b.kappa_max + 1) ** 2 * b.array_gain_limit == pytest.approx(1, abs=1e-12)
    assert default_wng_floor_db(15) == pytest.approx(w_db)


def test_gain_limit_two():
    b = kappa_max_from_wng(10 * math.log10(15 / 2), 15)
    assert b.kappa_max == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-12)
    assert 4 * b.kappa_max / (b.kappa_max + 1) ** 2 == pytest.approx(0.5, rel=1e-12)


def test_floor_above_maximum_rejected():
    with pytest.raises(ValueError):
        kappa_max_from_wng(10 * math.log10(15) + 0.1, 15)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 64), st.floats(0.0, 40.0))
def test_cap_round_trip(M, below_db):
    w_db = 10 * math.log10(M) - below_db
    b = kappa_max_from_wng(w_db, M)
    assert b.kappa_max >= 1.0
    assert b.kappa_max == pytest.approx(kappa_closed_form(b.array_gain_limit), rel=1e-12)
    assert wng_floor_from_kappa(b.kappa_max, M) == pytest.approx(b.w_min_linear, rel=1e-10)


# --- required loading

def test_loading_examples():
    assert required_loading(5, 1, 10) == 0.0
    assert required_loading(10, 1, 4) == 2.0 and (10 + 2) / (1 + 2) == 4
    assert required_loading(1, 0, 3) == 0.5 and (1 + 0.5) / (0 + 0.5) == 3


def test_loading_cap_one():
    assert required_loading(2.0, 2.0, 1.0) == 0.0
    with pytest.raises(InfeasibleLoadingError):
        required_loading(2.0, 1.0, 1.0)


def test_loading_rejects_bad_extremes():
    with pytest.raises(ValueError):
        required_loading(1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        required_loading(1.0, -1.0, 3.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 1e6), st.floats(0, 1), st.floats(1.0001, 1e4))
def test_loading_minimal_and_sufficient(lmax, frac, kappa):
    lmin = lmax * frac
    mu = required_loading(lmax, lmin, kappa)
    assert mu >= 0
    if lmax <= kappa * lmin:
        assert mu == 0.0
    else:
        assert (lmax + mu) / (lmin + mu) == pytest.approx(kappa, rel=1e-9)


# --- policies

def test_policy_field_presence():
    b = kappa_max_from_wng(8.0, 15)
    with pytest.raises(ValueError):
        LoadingPolicy("lanczos", b)
    with pytest.raises(ValueError):
        LoadingPolicy("exact-evd", b, k=4)
    with pytest.raises(ValueError):
        LoadingPolicy("fixed", b)
    with pytest.raises(ValueError):
        LoadingPolicy("gershgorin", b, fixed_mu=1.0)
    with pytest.raises(ValueError):
        LoadingPolicy("bogus", b)
    assert LoadingPolicy.create("lanczos", 15).k == 4


@pytest.mark.parametrize("mode", ["exact-evd", "lanczos", "gershgorin", "none"])
def test_identity_needs_no_load(mode):
    assert compute_loading(np.eye(15), LoadingPolicy.create(mode, 15)).mu == 0.0


def test_trace_bound_loads_identity():
    # (0, trace) encloses the spectrum but reads I as singular
    pol = LoadingPolicy.create("trace", 15)
    dec = compute_loading(np.eye(15), pol)
    assert dec.mu == pytest.approx(15 / (pol.bound.kappa_max - 1))


def test_fixed_mode():
    dec = compute_loading(np.eye(4), LoadingPolicy.create("fixed", 4, fixed_mu=0.25))
    assert dec.mu == 0.25 and dec.extremes is None


def test_rank_deficient_uses_zero_min(rng):
    R = random_psd_lowrank(rng, 15, 3)
    pol = LoadingPolicy.create("exact-evd", 15)
    dec = compute_loading(R, pol)
    lmax = np.linalg.eigvalsh(R)[-1]
    assert dec.extremes.lambda_min == 0.0
    assert dec.mu == pytest.approx(lmax / (pol.bound.kappa_max - 1), rel=1e-10)


def test_loaded_copies():
    R = np.eye(2, dtype=complex)
    Q = loaded(R, 0.5)
    assert np.allclose(Q.diagonal(), 1.5) and np.allclose(R.diagonal(), 1.0)


def test_relaxed_modes_load_more(rng):
    for _ in range(50):
        R = random_pd(rng, 15, shift=rng.uniform(0, 1))
        mus = {m: compute_loading(R, LoadingPolicy.create(m, 15)).mu
               for m in ("exact-evd", "gershgorin", "trace", "lanczos")}
        tol = 1e-9 * max(1.0, mus["exact-evd"])
        assert mus["gershgorin"] >= mus["exact-evd"] - tol
        assert mus["trace"] >= mus["exact-evd"] - tol
        assert mus["exact-evd"] >= mus["lanczos"] - tol


def test_loaded_matrix_meets_cap(rng):
    R = random_psd_lowrank(rng, 15, 4) + 1e-3 * np.eye(15)
    pol = LoadingPolicy.create("exact-evd", 15)
    dec = compute_loading(R, pol)
    w = np.linalg.eigvalsh(loaded(R, dec.mu))
    assert w[-1] / w[0] == pytest.approx(pol.bound.kappa_max, rel=1e-9)
