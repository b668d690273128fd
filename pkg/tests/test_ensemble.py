import math

import numpy as np
import pytest

from eigenphase.corrlab import mean_correlation
from eigenphase.ensemble import (
    EnsembleSpec,
    baseline,
    one_factor_sample,
    replicate_rng,
    woe_sample,
)
from eigenphase.phase import matrix_entropies


def test_woe_sample_is_deterministic():
    spec = EnsembleSpec(10, 30, 3, 42)
    assert woe_sample(spec, 1).tobytes() == woe_sample(spec, 1).tobytes()
    assert woe_sample(spec, 1).tobytes() != woe_sample(spec, 2).tobytes()


def test_replicate_streams_are_independent_of_order():
    a = replicate_rng(5, 3).standard_normal(4)
    replicate_rng(5, 0).standard_normal(100)
    assert replicate_rng(5, 3).standard_normal(4).tobytes() == a.tobytes()


def test_woe_replicate_index_range():
    with pytest.raises(IndexError):
        woe_sample(EnsembleSpec(3, 3, 2, 0), 2)


def test_woe_large_sample_decorrelates():
    T = 40_000
    c = woe_sample(EnsembleSpec(2, T, 1, 9), 0)
    assert abs(c[0, 1]) < 5 / math.sqrt(T)


def test_woe_entropy_near_log_n():
    c = woe_sample(EnsembleSpec(194, 194, 1, 3), 0)
    assert abs(matrix_entropies(c)[0] / math.log(194) - 1) < 0.02


@pytest.mark.parametrize("spec", [EnsembleSpec(8, 20, 3, 1), EnsembleSpec(30, None, 2, 2)])
def test_samples_are_valid_correlation_matrices(spec):
    for r in range(spec.replicates):
        c = woe_sample(spec, r)
        assert np.max(np.abs(c - c.T)) <= 1e-12
        assert np.all(np.diag(c) == 1)
        assert np.linalg.eigvalsh(c).min() >= -1e-10
    c = one_factor_sample(spec.n_assets, spec.n_obs, 0.6, spec.seed, 0)
    assert np.all(np.diag(c) == 1) and np.linalg.eigvalsh(c).min() >= -1e-10


def test_zero_loading_reproduces_woe():
    spec = EnsembleSpec(6, 25, 4, 77)
    assert one_factor_sample(6, 25, 0.0, 77, 3).tobytes() == woe_sample(spec, 3).tobytes()


def test_loading_near_one_gives_mu_near_one():
    c = one_factor_sample(10, 5000, 0.999, 1)
    assert mean_correlation(c) > 0.99


def test_one_factor_mean_correlation():
    mus = [mean_correlation(one_factor_sample(100, 4000, 0.5, 12, r)) for r in range(100)]
    assert abs(np.mean(mus) - 0.25) < 0.03
    assert all(abs(m - 0.25) < 0.03 for m in mus)


def test_one_factor_mu_monotone_in_loading():
    grid = np.linspace(0, 0.95, 8)
    means, errs = [], []
    for b in grid:
        mus = [mean_correlation(one_factor_sample(20, 300, b, 5, r)) for r in range(20)]
        means.append(np.mean(mus))
        errs.append(np.std(mus) / math.sqrt(len(mus)))
    for k in range(len(grid) - 1):
        assert means[k + 1] >= means[k] - 3 * math.hypot(errs[k], errs[k + 1])


def test_baseline_single_replicate():
    rep = baseline(EnsembleSpec(20, 20, 1, 0))
    assert rep.std_H == 0.0
    assert 0 < rep.mean_H <= math.log(20)


def test_baseline_shape_and_reproducibility():
    spec = EnsembleSpec(50, 50, 30, 8)
    rep = baseline(spec)
    p = np.array(rep.mean_centralities)
    assert len(p) == 50 and np.all(np.diff(p) <= 0)
    assert math.fsum(p) == pytest.approx(1, abs=1e-12)
    assert baseline(spec) == rep
    assert baseline(spec, jobs=2) == rep


def test_baseline_tracks_log_n():
    means = [baseline(EnsembleSpec(n, n, 20, 1)).mean_H for n in (50, 100, 150, 194)]
    assert all(b > a for a, b in zip(means, means[1:]))
    for n, h in zip((50, 100, 150, 194), means):
        assert abs(h / math.log(n) - 1) < 0.02


def test_bad_spec():
    with pytest.raises(ValueError):
        EnsembleSpec(1, 5, 1, 0)
    with pytest.raises(ValueError):
        one_factor_sample(3, 5, 1.0)
