import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import egf.forcing as forcing
from egf import IllConditionedKernelError, InvalidArgumentError, KernelConfig, make_interval_grid, sample_gp
from egf.forcing import covariance_factor, covariance_matrix, standard_normal_columns


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 8), offset=st.integers(0, 6), seed=st.integers(0, 10**6))
def test_columns_depend_only_on_seed_and_index(n, offset, seed):
    full = standard_normal_columns(7, offset + n, seed)
    part = standard_normal_columns(7, n, seed, offset=offset)
    assert np.array_equal(full[:, offset:], part)


def test_sample_gp_is_deterministic_and_seed_sensitive():
    g = make_interval_grid(0, 1, 60)
    cfg = KernelConfig(0.1)
    a = sample_gp(g, cfg, 4, seed=3).matrix
    assert np.array_equal(a, sample_gp(g, cfg, 4, seed=3).matrix)
    assert not np.allclose(a, sample_gp(g, cfg, 4, seed=4).matrix)


def test_sample_covariance_approaches_kernel():
    g = make_interval_grid(0, 1, 30)
    cfg = KernelConfig(0.2)
    F = sample_gp(g, cfg, 20000, seed=0).matrix
    emp = F @ F.T / F.shape[1]
    assert np.max(np.abs(emp - covariance_matrix(g, cfg))) < 0.05


def test_covariance_is_squared_exponential():
    g = make_interval_grid(0, 1, 5)
    K = covariance_matrix(g, KernelConfig(0.5))
    assert K[0, 1] == pytest.approx(np.exp(-0.25**2 / (2 * 0.25)))
    assert np.allclose(np.diag(K), 1.0)


def test_jitter_escalates_for_smooth_kernels():
    g = make_interval_grid(0, 1, 200)
    L, jitter = covariance_factor(g, KernelConfig(1.0))
    assert jitter > 0
    K = covariance_matrix(g, KernelConfig(1.0, jitter=jitter))
    assert np.allclose(L @ L.T, K)


def test_short_length_scale_needs_no_jitter():
    g = make_interval_grid(0, 1, 200)
    _, jitter = covariance_factor(g, KernelConfig(1e-3))
    assert jitter == 0.0


def test_exhausted_jitter_ladder_raises(monkeypatch):
    monkeypatch.setattr(forcing, "JITTER_LADDER", ())
    with pytest.raises(IllConditionedKernelError) as info:
        covariance_factor(make_interval_grid(0, 1, 200), KernelConfig(1.0))
    assert info.value.jitter == 0.0


@pytest.mark.parametrize("kw", [{"length_scale": 0.0}, {"length_scale": 0.1, "jitter": -1.0},
                                {"length_scale": 0.1, "family": "matern"}])
def test_kernel_config_validation(kw):
    with pytest.raises(InvalidArgumentError):
        KernelConfig(**kw)


def test_sample_count_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        sample_gp(make_interval_grid(0, 1, 10), KernelConfig(0.1), 0, seed=0)
