"""numba kernels.

Every function here has a twin with the same name and signature in
``_kernels_numpy``.  Kernels never raise; failures come back as an ``ok``
flag and the public wrappers turn them into exceptions.
"""

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


@njit(cache=True)
def matvec(A, x):
    n = A.shape[0]
    y = np.empty(n, dtype=np.complex128)
    for r in range(n):
        s = 0j
        for c in range(A.shape[1]):
            s += A[r, c] * x[c]
        y[r] = s
    return y


@njit(cache=True)
def gershgorin(A):
    n = A.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        rad = 0.0
        for j in range(n):
            if j != i:
                rad += abs(A[i, j])
        c = A[i, i].real
        if c - rad < lo:
            lo = c - rad
        if c + rad > hi:
            hi = c + rad
    return lo, hi


@njit(cache=True)
def rank1_update(R, y, scale):
    n = R.shape[0]
    for i in range(n):
        yi = scale * y[i]
        for j in range(n):
            R[i, j] += yi * y[j].conjugate()


@njit(cache=True)
def cholesky(A):
    n = A.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    maxdiag = 0.0
    for i in range(n):
        if A[i, i].real > maxdiag:
            maxdiag = A[i, i].real
    floor = n * _EPS * maxdiag
    for j in range(n):
        s = A[j, j].real
        for p in range(j):
            s -= L[j, p].real ** 2 + L[j, p].imag ** 2
        if not (s > floor) or not np.isfinite(s):
            return L, False
        ljj = np.sqrt(s)
        L[j, j] = ljj
        for i in range(j + 1, n):
            t = A[i, j]
            for p in range(j):
                t -= L[i, p] * L[j, p].conjugate()
            L[i, j] = t / ljj
    return L, True


@njit(cache=True)
def chol_solve(L, B):
    n, m = B.shape
    X = np.empty((n, m), dtype=np.complex128)
    z = np.empty(n, dtype=np.complex128)
    for col in range(m):
        for i in range(n):
            t = B[i, col]
            for p in range(i):
                t -= L[i, p] * z[p]
            z[i] = t / L[i, i].real
        for i in range(n - 1, -1, -1):
            t = z[i]
            for p in range(i + 1, n):
                t -= L[p, i].conjugate() * X[p, col]
            X[i, col] = t / L[i, i].real
    return X


@njit(cache=True)
def chol_quadform(L, D):
    n, m = D.shape
    out = np.empty(m)
    z = np.empty(n, dtype=np.complex128)
    for col in range(m):
        acc = 0.0
        for i in range(n):
            t = D[i, col]
            for p in range(i):
                t -= L[i, p] * z[p]
            t = t / L[i, i].real
            z[i] = t
            acc += t.real * t.real + t.imag * t.imag
        out[col] = acc
    return out


@njit(cache=True)
def _tridiagonalize(A, want_q):
    """Unitary reduction of a Hermitian matrix to real symmetric tridiagonal.

    Returns (d, e, Z) with e[i] coupling rows i and i+1 (e[n-1] = 0) and,
    when ``want_q``, A = Z T Z^H.
    """
    n = A.shape[0]
    a = A.copy()
    if want_q:
        Z = np.eye(n, dtype=np.complex128)
    else:
        Z = np.zeros((1, 1), dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    p = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        alpha2 = 0.0
        for i in range(m):
            x = a[k + 1 + i, k]
            alpha2 += x.real * x.real + x.imag * x.imag
        if alpha2 == 0.0:
            continue
        alpha = np.sqrt(alpha2)
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0j
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] += phase * alpha
        tau = 1.0 / (alpha * (alpha + ax0))
        # p = tau * S v over the trailing block
        kk = 0.0
        for i in range(m):
            s = 0j
            for j in range(m):
                s += a[k + 1 + i, k + 1 + j] * v[j]
            p[i] = tau * s
            kk += (v[i].conjugate() * p[i]).real
        kk *= 0.5 * tau
        for i in range(m):
            p[i] -= kk * v[i]
        for i in range(m):
            vi = v[i]
            pi = p[i]
            for j in range(m):
                a[k + 1 + i, k + 1 + j] -= vi * p[j].conjugate() + pi * v[j].conjugate()
        a[k + 1, k] = -phase * alpha
        a[k, k + 1] = (-phase * alpha).conjugate()
        for i in range(1, m):
            a[k + 1 + i, k] = 0.0
            a[k, k + 1 + i] = 0.0
        if want_q:
            for r in range(n):
                s = 0j
                for j in range(m):
                    s += Z[r, k + 1 + j] * v[j]
                s *= tau
                for j in range(m):
                    Z[r, k + 1 + j] -= s * v[j].conjugate()
    d = np.empty(n)
    e = np.zeros(n)
    ph = 1.0 + 0j
    for i in range(n):
        d[i] = a[i, i].real
    for i in range(n - 1):
        off = a[i + 1, i]
        aoff = abs(off)
        e[i] = aoff
        if aoff > 0.0:
            ph = ph * off / aoff
        if want_q:
            for r in range(n):
                Z[r, i + 1] *= ph
    return d, e, Z


@njit(cache=True)
def _tql(d, e, Z, want_z):
    """Implicit-shift QL on a real symmetric tridiagonal, in place."""
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 60:
                return False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_z:
                    for k in range(Z.shape[0]):
                        f2 = Z[k, i + 1]
                        Z[k, i + 1] = s * Z[k, i] + c * f2
                        Z[k, i] = c * Z[k, i] - s * f2
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return True


@njit(cache=True)
def hermitian_eigvalsh(A):
    d, e, Z = _tridiagonalize(A, False)
    ok = _tql(d, e, Z, False)
    d.sort()
    return d, ok


@njit(cache=True)
def hermitian_eigh(A):
    d, e, Z = _tridiagonalize(A, True)
    ok = _tql(d, e, Z, True)
    order = np.argsort(d)
    n = d.shape[0]
    w = np.empty(n)
    V = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        w[j] = d[order[j]]
        for r in range(n):
            V[r, j] = Z[r, order[j]]
    return w, V, ok


@njit(cache=True)
def _sturm_count(alpha, beta2, x, pivmin):
    q = alpha[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    c = 1 if q < 0.0 else 0
    for i in range(1, alpha.shape[0]):
        q = alpha[i] - x - beta2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            c += 1
    return c


@njit(cache=True)
def _tridiag_setup(alpha, beta):
    k = alpha.shape[0]
    beta2 = np.empty(max(k - 1, 0))
    lo = np.inf
    hi = -np.inf
    bmax = 0.0
    for i in range(k):
        rad = 0.0
        if i > 0:
            rad += abs(beta[i - 1])
        if i < k - 1:
            rad += abs(beta[i])
            beta2[i] = beta[i] * beta[i]
            if beta2[i] > bmax:
                bmax = beta2[i]
        if alpha[i] - rad < lo:
            lo = alpha[i] - rad
        if alpha[i] + rad > hi:
            hi = alpha[i] + rad
    scale = max(abs(lo), abs(hi))
    lo -= 4.0 * k * _EPS * scale
    hi += 4.0 * k * _EPS * scale
    pivmin = _TINY * max(1.0, bmax)
    return beta2, lo, hi, scale, pivmin


@njit(cache=True)
def _bisect(alpha, beta2, i, a, b, atol, pivmin):
    """i-th smallest eigenvalue, given count(a) <= i < count(b)."""
    for _ in range(400):
        width = b - a
        if width <= atol or width <= 2.0 * _EPS * max(abs(a), abs(b)):
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if _sturm_count(alpha, beta2, mid, pivmin) > i:
            b = mid
        else:
            a = mid
    return a, b


@njit(cache=True)
def tridiag_eigvals(alpha, beta):
    k = alpha.shape[0]
    beta2, lo, hi, scale, pivmin = _tridiag_setup(alpha, beta)
    if scale == 0.0:
        return np.zeros(k)
    atol = _EPS * scale
    out = np.empty(k)
    left = lo
    for i in range(k):
        a, b = _bisect(alpha, beta2, i, left, hi, atol, pivmin)
        out[i] = 0.5 * (a + b)
        left = a
    return out


@njit(cache=True)
def tridiag_extremes(alpha, beta):
    """Smallest and largest eigenvalue; both brackets shrink in one loop."""
    k = alpha.shape[0]
    beta2, lo, hi, scale, pivmin = _tridiag_setup(alpha, beta)
    if scale == 0.0:
        return 0.0, 0.0
    atol = _EPS * scale
    # a diagonal entry is a Rayleigh quotient, so it brackets both extremes
    amin = alpha.min()
    amax = alpha.max()
    a0, b0 = lo, amin
    a1, b1 = amax, hi
    for _ in range(400):
        w0 = b0 - a0
        w1 = b1 - a1
        done0 = w0 <= atol or w0 <= 2.0 * _EPS * max(abs(a0), abs(b0))
        done1 = w1 <= atol or w1 <= 2.0 * _EPS * max(abs(a1), abs(b1))
        if done0 and done1:
            break
        m0 = 0.5 * (a0 + b0)
        m1 = 0.5 * (a1 + b1)
        q0 = alpha[0] - m0
        q1 = alpha[0] - m1
        if abs(q0) < pivmin:
            q0 = -pivmin
        if abs(q1) < pivmin:
            q1 = -pivmin
        c0 = 1 if q0 < 0.0 else 0
        c1 = 1 if q1 < 0.0 else 0
        for i in range(1, k):
            q0 = alpha[i] - m0 - beta2[i - 1] / q0
            q1 = alpha[i] - m1 - beta2[i - 1] / q1
            if abs(q0) < pivmin:
                q0 = -pivmin
            if abs(q1) < pivmin:
                q1 = -pivmin
            if q0 < 0.0:
                c0 += 1
            if q1 < 0.0:
                c1 += 1
        if not done0 and a0 < m0 < b0:
            if c0 > 0:
                b0 = m0
            else:
                a0 = m0
        if not done1 and a1 < m1 < b1:
            if c1 > k - 1:
                b1 = m1
            else:
                a1 = m1
    return 0.5 * (a0 + b0), 0.5 * (a1 + b1)


@njit(cache=True)
def lanczos(Q, v1, k, bk_rtol, reorth):
    """Bare three-term recursion; rows of V are v_1..v_k.

    Returns (alpha, beta, V, j_eff, breakdown, ok). beta[j] is the norm of the
    j-th residual, so the tridiagonal uses beta[:j_eff-1].  Breakdown means a
    residual below ``bk_rtol * ||Q||_F`` before step k.
    """
    n = Q.shape[0]
    fro2 = 0.0
    for r in range(n):
        for c in range(n):
            fro2 += Q[r, c].real * Q[r, c].real + Q[r, c].imag * Q[r, c].imag
    bk_tol = bk_rtol * np.sqrt(fro2)
    V = np.zeros((k, n), dtype=np.complex128)
    alpha = np.zeros(k)
    beta = np.zeros(k)
    w = np.empty(n, dtype=np.complex128)
    V[0, :] = v1
    j_eff = 0
    breakdown = False
    for j in range(k):
        vj = V[j]
        for r in range(n):
            s = 0j
            for c in range(n):
                s += Q[r, c] * vj[c]
            w[r] = s
        j_eff = j + 1
        if j > 0:
            b = beta[j - 1]
            vp = V[j - 1]
            for r in range(n):
                w[r] -= b * vp[r]
        a = 0.0
        for r in range(n):
            a += vj[r].real * w[r].real + vj[r].imag * w[r].imag
        alpha[j] = a
        for r in range(n):
            w[r] -= a * vj[r]
        if reorth:
            for i in range(j + 1):
                vi = V[i]
                h = 0j
                for r in range(n):
                    h += vi[r].conjugate() * w[r]
                for r in range(n):
                    w[r] -= h * vi[r]
        nrm2 = 0.0
        for r in range(n):
            nrm2 += w[r].real * w[r].real + w[r].imag * w[r].imag
        nrm = np.sqrt(nrm2)
        beta[j] = nrm
        if not (np.isfinite(a) and np.isfinite(nrm)):
            return alpha, beta, V, j_eff, breakdown, False
        if j == k - 1:
            break
        if nrm < bk_tol:
            breakdown = True
            break
        inv = 1.0 / nrm
        for r in range(n):
            V[j + 1, r] = w[r] * inv
    return alpha, beta, V, j_eff, breakdown, True


@njit(cache=True)
def lanczos_extremes(Q, v1, k, bk_rtol, reorth):
    """Extreme Ritz values without returning the basis: (lo, hi, j_eff, ok)."""
    alpha, beta, V, j_eff, breakdown, ok = lanczos(Q, v1, k, bk_rtol, reorth)
    if not ok:
        return np.nan, np.nan, j_eff, False
    lo, hi = tridiag_extremes(alpha[:j_eff], beta[: j_eff - 1])
    return lo, hi, j_eff, True
