"""Wishart orthogonal ensemble baselines and a one-factor synthetic generator.

Random numbers come from the Philox counter-based generator keyed by
``(seed, replicate_index)``: replicate streams are independent, need no
shared state, and any replicate can be regenerated on its own.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .corrlab import pearson_matrix
from .phase import eigen_entropy
from .spectral import abs_power, perron_centrality

__all__ = [
    "EnsembleSpec",
    "BaselineReport",
    "replicate_rng",
    "woe_returns",
    "woe_sample",
    "one_factor_returns",
    "one_factor_sample",
    "baseline",
]

_MASK64 = (1 << 64) - 1


def replicate_rng(seed: int, replicate_index: int) -> np.random.Generator:
    """Generator for one replicate: Philox keyed by ``(seed, replicate_index)``."""
    if replicate_index < 0:
        raise ValueError("replicate_index must be non-negative")
    key = (int(seed) & _MASK64) | ((int(replicate_index) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class EnsembleSpec:
    n_assets: int
    n_obs: int | None = None  # defaults to n_assets (Q = 1)
    replicates: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_obs is None:
            object.__setattr__(self, "n_obs", self.n_assets)
        if self.n_assets < 2 or self.n_obs < 2 or self.replicates < 1:
            raise ValueError(f"invalid ensemble spec {self}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class BaselineReport:
    n_assets: int
    n_obs: int
    replicates: int
    seed: int
    n_power: int
    mean_H: float
    std_H: float
    mean_centralities: tuple[float, ...]  # descending, averaged rank by rank

    @property
    def ln_n(self) -> float:
        return math.log(self.n_assets)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean_centralities"] = list(self.mean_centralities)
        d["ln_N"] = self.ln_n
        return d


def woe_returns(spec: EnsembleSpec, replicate_index: int) -> np.ndarray:
    if not (0 <= replicate_index < spec.replicates):
        raise IndexError(f"replicate {replicate_index} outside [0, {spec.replicates})")
    rng = replicate_rng(spec.seed, replicate_index)
    return rng.standard_normal((spec.n_assets, spec.n_obs))


def woe_sample(spec: EnsembleSpec, replicate_index: int) -> np.ndarray:
    """Pearson correlation of an i.i.d. standard Gaussian ``N x T`` panel."""
    return pearson_matrix(woe_returns(spec, replicate_index))[0]


def one_factor_returns(n_assets: int, n_obs: int, loading: float,
                       seed: int = 0, replicate_index: int = 0) -> np.ndarray:
    """``r_i(t) = b f(t) + sqrt(1 - b^2) eps_i(t)`` with standard Gaussian ``f`` and ``eps``.

    The idiosyncratic block is drawn first, so ``loading=0`` reproduces the
    WOE panel of the same ``(seed, replicate_index)`` exactly.
    """
    if not (0.0 <= loading < 1.0):
        raise ValueError(f"loading must lie in [0, 1), got {loading}")
    rng = replicate_rng(seed, replicate_index)
    eps = rng.standard_normal((n_assets, n_obs))
    f = rng.standard_normal(n_obs)
    return loading * f + math.sqrt(1.0 - loading * loading) * eps


def one_factor_sample(n_assets: int, n_obs: int, loading: float,
                      seed: int = 0, replicate_index: int = 0) -> np.ndarray:
    """Sample correlation of a one-factor panel; expected off-diagonal ``loading**2``."""
    return pearson_matrix(one_factor_returns(n_assets, n_obs, loading, seed, replicate_index))[0]


def _replicate(args):
    spec, n_power, r = args
    cv = perron_centrality(abs_power(woe_sample(spec, r), n_power))
    return eigen_entropy(cv), np.sort(cv.p)[::-1]


def baseline(spec: EnsembleSpec, n_power: int = 2, jobs: int = 1) -> BaselineReport:
    """Mean/std of ``H`` and the mean ranked centrality curve over the ensemble.

    Sums use :func:`math.fsum`, so the report does not depend on the order in
    which replicates finish.
    """
    tasks = [(spec, n_power, r) for r in range(spec.replicates)]
    if jobs > 1 and spec.replicates > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_replicate, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_replicate(t) for t in tasks]
    hs = [h for h, _ in results]
    R = len(hs)
    mean_h = math.fsum(hs) / R
    var_h = math.fsum((h - mean_h) ** 2 for h in hs) / R
    ranked = np.stack([p for _, p in results])
    mean_p = tuple(math.fsum(ranked[:, i]) / R for i in range(ranked.shape[1]))
    return BaselineReport(spec.n_assets, spec.n_obs, spec.replicates, spec.seed, int(n_power),
                          mean_h, math.sqrt(var_h), mean_p)
