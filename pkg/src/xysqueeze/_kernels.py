"""Compiled inner loops: leading principal minors of Toeplitz matrices."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def leading_minors_qr(T):
    """Signs and log-magnitudes of all leading principal minors of ``T``.

    Builds ``T[:m+1, :m+1] = Q R`` from the factorization of ``T[:m, :m]``
    by appending the new column and rotating the new row away with Givens
    rotations.  Every step is orthogonal, so each minor comes from a
    backward-stable factorization, and the whole sequence costs O(n^3).
    ``det Q = 1`` throughout, hence ``det T[:m+1, :m+1] = prod diag(R)``.

    Returns
    -------
    sign, logabs : ndarray
        ``det T[:m, :m] = sign[m-1] * exp(logabs[m-1])``.
    """
    n = T.shape[0]
    Qt = np.zeros((n, n))  # transpose of Q, rows are contiguous
    R = np.zeros((n, n))
    sign = np.zeros(n)
    logabs = np.full(n, -np.inf)
    for m in range(n):
        for i in range(m):
            acc = 0.0
            for r in range(m):
                acc += Qt[i, r] * T[r, m]
            R[i, m] = acc
        for j in range(m + 1):
            R[m, j] = T[m, j]
        Qt[m, m] = 1.0
        for i in range(m):
            x = R[i, i]
            y = R[m, i]
            if y == 0.0:
                continue
            rho = np.hypot(x, y)
            c = x / rho
            s = y / rho
            for j in range(i, m + 1):
                a = R[i, j]
                b = R[m, j]
                R[i, j] = c * a + s * b
                R[m, j] = c * b - s * a
            R[m, i] = 0.0
            for r in range(m + 1):
                a = Qt[i, r]
                b = Qt[m, r]
                Qt[i, r] = c * a + s * b
                Qt[m, r] = c * b - s * a
        sg = 1.0
        la = 0.0
        for i in range(m + 1):
            d = R[i, i]
            if d == 0.0:
                sg = 0.0
                la = -np.inf
                break
            if d < 0.0:
                sg = -sg
            la += np.log(abs(d))
        sign[m] = sg
        logabs[m] = la
    return sign, logabs


@njit(cache=True, nogil=True)
def toeplitz_from_kernel(q, n, shift):
    """``T[i, j] = Q(j - i + shift)`` for ``i, j < n``; ``q[r + len//2] = Q(r)``."""
    c = q.shape[0] // 2
    T = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            T[i, j] = q[c + j - i + shift]
    return T


@njit(cache=True, nogil=True)
def _minor_sum(T):
    sg, la = leading_minors_qr(T)
    tot = 0.0
    for i in range(sg.shape[0]):
        if sg[i] != 0.0:
            tot += sg[i] * np.exp(la[i])
    return tot


@njit(cache=True, nogil=True)
def string_sums_batch(Q, n):
    """Summed minors of orders 1..n of ``[Q(j-i+1)]`` and ``[Q(j-i-1)]``.

    ``Q`` holds one kernel per row (offsets ``-(N-1) .. N-1``).
    """
    m = Q.shape[0]
    sx = np.zeros(m)
    sy = np.zeros(m)
    for b in range(m):
        q = Q[b]
        sx[b] = _minor_sum(toeplitz_from_kernel(q, n, 1))
        sy[b] = _minor_sum(toeplitz_from_kernel(q, n, -1))
    return sx, sy
