"""Random forcing ensembles drawn from a zero-mean Gaussian process.

Columns are generated independently: column ``j`` of an ensemble with seed
``s`` is ``L @ z`` where ``z`` comes from a generator seeded by
``SeedSequence(s, spawn_key=(j,))``. Any subset of columns can therefore be
produced separately (or concurrently) and reassembled bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from .errors import IllConditionedKernelError, InvalidArgumentError
from .grid import SensorGrid

JITTER_LADDER = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass(frozen=True)
class KernelConfig:
    length_scale: float
    jitter: float = 0.0
    family: str = "squared_exponential"

    def __post_init__(self):
        if not self.length_scale > 0:
            raise InvalidArgumentError(f"length_scale must be positive, got {self.length_scale!r}")
        if not self.jitter >= 0:
            raise InvalidArgumentError(f"jitter must be nonnegative, got {self.jitter!r}")
        if self.family != "squared_exponential":
            raise InvalidArgumentError(f"unsupported kernel family {self.family!r}")


@dataclass(frozen=True, eq=False)
class ForcingEnsemble:
    """Forcing matrix ``F`` (sensors x samples) on a grid."""

    grid: SensorGrid
    matrix: np.ndarray
    seed: int | None = None
    kernel: KernelConfig | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim == 1:
            m = m[:, None]
        if m.shape[0] != self.grid.size or m.shape[1] < 1:
            raise InvalidArgumentError(
                f"forcing matrix {m.shape} does not fit a grid of {self.grid.size} sensors"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def n_samples(self):
        return self.matrix.shape[1]


def covariance_matrix(grid, cfg):
    """Squared-exponential covariance at the sensors, plus ``cfg.jitter`` on the diagonal."""
    d2 = cdist(grid.points, grid.points, "sqeuclidean")
    K = np.exp(-d2 / (2.0 * cfg.length_scale**2))
    if cfg.jitter:
        K[np.diag_indices_from(K)] += cfg.jitter
    return K


def covariance_factor(grid, cfg):
    """Lower Cholesky factor of the covariance, escalating the jitter when needed.

    Returns ``(L, jitter)`` with ``jitter`` the total diagonal shift actually used.
    """
    K = covariance_matrix(grid, cfg)
    tried = cfg.jitter
    for extra in (0.0,) + JITTER_LADDER:
        tried = cfg.jitter + extra
        A = K if extra == 0.0 else K + extra * np.eye(len(K))
        try:
            return scipy.linalg.cholesky(A, lower=True, check_finite=False), tried
        except np.linalg.LinAlgError:
            continue
    raise IllConditionedKernelError(
        f"Cholesky of the covariance failed even with jitter {tried:.1e} "
        f"(length_scale={cfg.length_scale}, {grid.size} sensors)",
        jitter=tried,
    )


def standard_normal_columns(n_rows, n_cols, seed, offset=0):
    """``n_rows x n_cols`` standard normals; column ``j`` depends only on ``(seed, offset + j)``."""
    Z = np.empty((n_rows, n_cols))
    for j in range(n_cols):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(offset + j,)))
        Z[:, j] = rng.standard_normal(n_rows)
    return Z


def sample_gp(grid, cfg, n_samples, seed, *, offset=0, factor=None):
    """Draw ``n_samples`` i.i.d. columns from ``N(0, K)`` at the sensors.

    Parameters
    ----------
    grid : SensorGrid
    cfg : KernelConfig
    n_samples : int
    seed : int
    offset : int, optional
        Index of the first column; ``sample_gp(..., n, seed, offset=k)``
        reproduces columns ``k .. k+n-1`` of a larger ensemble.
    factor : ndarray, optional
        Precomputed Cholesky factor from :func:`covariance_factor`, to share
        one factorization between ensembles.
    """
    if int(n_samples) != n_samples or n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be a positive integer, got {n_samples!r}")
    if factor is None:
        factor, _ = covariance_factor(grid, cfg)
    Z = standard_normal_columns(grid.size, int(n_samples), seed, offset)
    return ForcingEnsemble(grid, factor @ Z, seed=seed, kernel=cfg)
