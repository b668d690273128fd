"""Symmetric eigendecomposition, Perron eigen-centrality and mode splitting.

Conventions shared by everything downstream:

* eigenvalues are sorted in descending order;
* inside a (numerically) degenerate eigenvalue cluster the first basis vector
  is the normalised projection of the all-ones vector onto the cluster, so a
  degenerate leading eigenspace yields the same vector that power iteration
  from the uniform start converges to;
* each eigenvector is signed so that its largest-magnitude entry is
  non-negative (first such entry on ties).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jacobi import jacobi_sweeps, power_iteration
from .errors import BadGroupCount, NoConvergence, NotSymmetric, ZeroMatrix

__all__ = [
    "SpectralDecomposition",
    "CentralityVector",
    "ModeSplit",
    "JACOBI_TOL",
    "JACOBI_MAX_SWEEPS",
    "POWER_RTOL",
    "POWER_MAX_ITER",
    "symmetric_eigen",
    "abs_power",
    "perron_centrality",
    "market_mode",
    "mode_split",
    "marchenko_pastur_upper",
    "count_group_modes",
]

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
POWER_RTOL = 1e-13
POWER_MAX_ITER = 10_000
SYMMETRY_ATOL = 1e-10
# relative width of an eigenvalue cluster treated as degenerate
CLUSTER_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # (N,), descending
    eigenvectors: np.ndarray  # (N, N), column k pairs with eigenvalues[k]
    sweeps: int = 0

    def __len__(self):
        return self.eigenvalues.shape[0]

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def reconstruct(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """``sum_k lambda_k v_k v_k^T`` over ``k`` in ``[start, stop)``."""
        v = self.eigenvectors[:, start:stop]
        return (v * self.eigenvalues[start:stop]) @ v.T


@dataclass(frozen=True, eq=False)
class CentralityVector:
    p: np.ndarray
    converged: bool
    iterations: int
    method: str = "power"  # "power", "eigen" (fallback) or "trivial"

    def __len__(self):
        return self.p.shape[0]


@dataclass(frozen=True, eq=False)
class ModeSplit:
    market: np.ndarray
    group_random: np.ndarray
    group: np.ndarray | None = None
    random: np.ndarray | None = None
    n_group: int | None = None


def _check_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _sign_fix(v: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[idx, np.arange(v.shape[1])] < 0, -1.0, 1.0)
    return v * signs


def _canonical_clusters(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    tol = CLUSTER_RTOL * max(1.0, float(np.max(np.abs(w)))) if n else 0.0
    ones = np.full(n, 1.0 / math.sqrt(n)) if n else np.empty(0)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[start] - w[stop] <= tol:
            stop += 1
        if stop - start > 1:
            block = v[:, start:stop]
            lead = block @ (block.T @ ones)
            norm = np.linalg.norm(lead)
            if norm > 1e-8:
                lead /= norm
                rest = block - np.outer(lead, lead @ block)
                u = np.linalg.svd(rest, full_matrices=False)[0][:, : stop - start - 1]
                u -= np.outer(lead, lead @ u)  # re-orthogonalise against the lead vector
                v[:, start] = lead
                v[:, start + 1:stop] = u
        start = stop
    return v


def symmetric_eigen(a: np.ndarray) -> SpectralDecomposition:
    """Full eigensystem of a symmetric matrix by cyclic Jacobi rotations.

    Raises :class:`NotSymmetric` if ``a`` departs from symmetry by more than
    ``1e-10`` (scaled by its largest entry when that exceeds one) and
    :class:`NoConvergence` if 100 sweeps do not bring the off-diagonal norm
    below ``1e-12`` of the Frobenius norm.
    """
    a = _check_square(a)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and float(np.max(np.abs(a - a.T))) > SYMMETRY_ATOL * scale:
        raise NotSymmetric("matrix is not symmetric")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    sym = np.ascontiguousarray(0.5 * (a + a.T))
    w, rows, sweeps, ok = jacobi_sweeps(sym, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not ok:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = rows[order].T.copy()
    v = _canonical_clusters(w, v)
    return SpectralDecomposition(w, _sign_fix(v), int(sweeps))


def abs_power(c: np.ndarray, n: int = 2) -> np.ndarray:
    """Elementwise ``|c_ij| ** n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"power must be a positive integer, got {n}")
    return np.abs(np.asarray(c, dtype=float)) ** int(n)


def perron_centrality(a: np.ndarray) -> CentralityVector:
    """Sum-normalised Perron eigenvector of a non-negative symmetric matrix.

    Power iteration starts from the uniform vector, so matrices for which the
    uniform vector is already an eigenvector (identity, all-ones, regular
    graphs) return the uniform centrality. If the iteration budget runs out
    the leading eigenvector of :func:`symmetric_eigen` is used instead.
    """
    a = _check_square(a)
    n = a.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    if np.any(a < 0):
        raise ValueError("perron_centrality needs a non-negative matrix")
    if not np.any(a):
        raise ZeroMatrix("centrality of the zero matrix is undefined")
    scale = float(np.max(a))
    if float(np.max(np.abs(a - a.T))) > SYMMETRY_ATOL * max(1.0, scale):
        raise NotSymmetric("matrix is not symmetric")
    if n == 1:
        return CentralityVector(np.ones(1), True, 0, "trivial")

    # rescaling leaves the eigenvectors alone and keeps iterates well inside range
    x0 = np.full(n, 1.0 / n)
    x, iters, ok = power_iteration(np.ascontiguousarray(a / scale), x0, POWER_RTOL, POWER_MAX_ITER)
    if ok:
        return CentralityVector(x, True, int(iters), "power")
    try:
        d = symmetric_eigen(a)
    except NoConvergence:
        return CentralityVector(x, False, int(iters), "power")
    p = np.abs(d.vector(0))
    return CentralityVector(p / p.sum(), True, int(iters), "eigen")


def market_mode(d: SpectralDecomposition) -> np.ndarray:
    """Rank-one market component ``lambda_1 v_1 v_1^T``."""
    if len(d) < 2:
        raise ValueError("market mode needs N >= 2")
    v = d.vector(0)
    return d.eigenvalues[0] * np.outer(v, v)


def mode_split(c: np.ndarray, d: SpectralDecomposition | None = None,
               n_group: int | None = None) -> ModeSplit:
    """Split ``c`` into market, group and random parts.

    The group-random part is ``c - C_M``. With ``n_group`` the group part
    collects eigen-components ``2..n_group`` (1-based) and the random part is
    what is left, so the three pieces add back to ``c``.
    """
    c = _check_square(c)
    if d is None:
        d = symmetric_eigen(c)
    n = c.shape[0]
    if n_group is not None and not (2 <= n_group <= n - 1):
        raise BadGroupCount(f"n_group must lie in [2, {n - 1}], got {n_group}")
    market = market_mode(d)
    group_random = c - market
    if n_group is None:
        return ModeSplit(market, group_random)
    group = d.reconstruct(1, n_group)
    random = group_random - group
    return ModeSplit(market, group_random, group, random, n_group)


def marchenko_pastur_upper(sigma: float = 1.0, q: float = 1.0) -> float:
    """Upper edge ``sigma^2 (1 + 1/sqrt(q))^2`` of the noise spectrum, ``q = M/N``."""
    if sigma <= 0 or q <= 0:
        raise ValueError("sigma and q must be positive")
    return sigma * sigma * (1.0 + 1.0 / math.sqrt(q)) ** 2


def count_group_modes(eigenvalues, lambda_plus: float) -> int:
    """``N_G`` such that eigenvalues ``2..N_G`` satisfy ``lambda_+ <= lambda < lambda_1``.

    Returns 1 when no eigenvalue below the market mode clears the noise edge.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if w.size == 0:
        return 0
    above = (w[1:] >= lambda_plus) & (w[1:] < w[0])
    return 1 + int(np.sum(above))
