"""Pure-numpy twins of the numba kernels (same names, same return shapes)."""

import numpy as np

_EPS = np.finfo(np.float64).eps


def matvec(A, x):
    return A @ x


def gershgorin(A):
    c = A.diagonal().real
    rad = np.abs(A).sum(axis=1) - np.abs(A.diagonal())
    return float(np.min(c - rad)), float(np.max(c + rad))


def rank1_update(R, y, scale):
    R += scale * np.outer(y, y.conj())


def cholesky(A):
    n = A.shape[0]
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return np.zeros((n, n), dtype=np.complex128), False
    floor = n * _EPS * max(float(A.diagonal().real.max()), 0.0)
    piv = L.diagonal().real ** 2
    ok = bool(np.all(np.isfinite(piv)) and np.all(piv > floor))
    return L.astype(np.complex128, copy=False), ok


def chol_solve(L, B):
    z = np.linalg.solve(L, B)
    return np.linalg.solve(L.conj().T, z)


def chol_quadform(L, D):
    Z = np.linalg.solve(L, D)
    return np.sum(Z.real ** 2 + Z.imag ** 2, axis=0)


def hermitian_eigvalsh(A):
    try:
        return np.linalg.eigvalsh(A), True
    except np.linalg.LinAlgError:
        return np.full(A.shape[0], np.nan), False


def hermitian_eigh(A):
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError:
        n = A.shape[0]
        return np.full(n, np.nan), np.full((n, n), np.nan + 0j), False
    return w, V, True


def _tridiag_dense(alpha, beta):
    return np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)


def tridiag_eigvals(alpha, beta):
    # LAPACK on the small dense matrix; the numba backend bisects instead
    return np.linalg.eigvalsh(_tridiag_dense(alpha, beta))


def tridiag_extremes(alpha, beta):
    w = tridiag_eigvals(alpha, beta)
    return float(w[0]), float(w[-1])


def lanczos(Q, v1, k, bk_rtol, reorth):
    n = Q.shape[0]
    bk_tol = bk_rtol * float(np.linalg.norm(Q))
    V = np.zeros((k, n), dtype=np.complex128)
    alpha = np.zeros(k)
    beta = np.zeros(k)
    V[0] = v1
    j_eff = 0
    breakdown = False
    for j in range(k):
        w = Q @ V[j]
        j_eff = j + 1
        if j > 0:
            w = w - beta[j - 1] * V[j - 1]
        a = float(np.vdot(V[j], w).real)
        alpha[j] = a
        w = w - a * V[j]
        if reorth:
            for i in range(j + 1):
                w = w - np.vdot(V[i], w) * V[i]
        nrm = float(np.linalg.norm(w))
        beta[j] = nrm
        if not (np.isfinite(a) and np.isfinite(nrm)):
            return alpha, beta, V, j_eff, breakdown, False
        if j == k - 1:
            break
        if nrm < bk_tol:
            breakdown = True
            break
        V[j + 1] = w / nrm
    return alpha, beta, V, j_eff, breakdown, True


def lanczos_extremes(Q, v1, k, bk_rtol, reorth):
    alpha, beta, V, j_eff, breakdown, ok = lanczos(Q, v1, k, bk_rtol, reorth)
    if not ok:
        return np.nan, np.nan, j_eff, False
    lo, hi = tridiag_extremes(alpha[:j_eff], beta[: j_eff - 1])
    return lo, hi, j_eff, True
