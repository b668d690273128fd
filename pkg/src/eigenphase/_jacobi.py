"""Cyclic Jacobi eigenvalue kernel (compiled with numba)."""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def jacobi_sweeps(a, tol, max_sweeps):
    """Diagonalise the symmetric matrix ``a`` by cyclic Jacobi rotations.

    Returns ``(eigenvalues, w, sweeps, converged)`` where the rows of ``w``
    are the eigenvectors (unsorted). Converged means the off-diagonal
    Frobenius norm is at most ``tol`` times the Frobenius norm of ``a``.
    """
    n = a.shape[0]
    a = a.copy()
    w = np.eye(n)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    bound = tol * math.sqrt(fro)

    for sweep in range(max_sweeps + 1):
        off = 0.0
        l1 = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
                l1 += abs(a[i, j])
        if math.sqrt(2.0 * off) <= bound:
            return np.diag(a).copy(), w, sweep, True
        if sweep == max_sweeps:
            break
        # early sweeps only rotate the larger elements
        thresh = 0.2 * l1 / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(a[p, p]) + g == abs(a[p, p]) and abs(a[q, q]) + g == abs(a[q, q]):
                    # negligible against both diagonal entries
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if apq == 0.0 or abs(apq) <= thresh:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rows p and q are contiguous; columns are restored by symmetry
                for k in range(n):
                    rp = a[p, k]
                    rq = a[q, k]
                    a[p, k] = c * rp - s * rq
                    a[q, k] = s * rp + c * rq
                for k in range(n):
                    a[k, p] = a[p, k]
                    a[k, q] = a[q, k]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vp = w[p, k]
                    vq = w[q, k]
                    w[p, k] = c * vp - s * vq
                    w[q, k] = s * vp + c * vq
    return np.diag(a).copy(), w, max_sweeps, False


@nb.njit(cache=True, nogil=True)
def power_iteration(a, x, rtol, max_iter):
    """Sum-normalised power iteration on a non-negative matrix.

    Returns ``(x, iterations, converged)``. Stops once the max-norm change
    between iterates is at most ``rtol`` times the max-norm of the iterate.
    """
    n = a.shape[0]
    y = np.empty(n)
    for it in range(1, max_iter + 1):
        total = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += a[i, j] * x[j]
            y[i] = acc
            total += acc
        if total <= 0.0:
            return x, it, False
        diff = 0.0
        big = 0.0
        for i in range(n):
            y[i] /= total
            d = abs(y[i] - x[i])
            if d > diff:
                diff = d
            if y[i] > big:
                big = y[i]
        x, y = y, x
        if diff <= rtol * big:
            return x, it, True
    return x, max_iter, False
