"""Low-rank empirical Green's functions ``G ~ Phi diag(sigma) Phi^T``.

A model acts on a forcing sampled at the sensors through the quadrature
weights: ``u = Phi diag(sigma) Phi^T W f``. Columns of ``Phi`` are
orthonormal in the W inner product.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, TooLargeError
from .grid import SensorGrid

PROVENANCES = ("pod", "rsvd", "interpolated", "exact")
DENSIFY_LIMIT = 10_000


@dataclass(frozen=True, eq=False)
class EgfModel:
    grid: SensorGrid
    phi: np.ndarray
    sigma: np.ndarray
    theta: float | None = None
    provenance: str = "pod"
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim == 1:
            phi = phi[:, None]
        sigma = np.asarray(self.sigma, dtype=float).ravel()
        if phi.shape != (self.grid.size, sigma.size):
            raise ShapeError(
                f"phi {phi.shape} and sigma ({sigma.size},) do not fit {self.grid.size} sensors"
            )
        if self.provenance not in PROVENANCES:
            raise ShapeError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "sigma", sigma)

    @property
    def rank(self):
        return self.sigma.size

    def gram(self):
        """``Phi^T W Phi``; the identity for a valid model."""
        return self.phi.T @ (self.grid.weights[:, None] * self.phi)

    def orthonormality_defect(self):
        if self.rank == 0:
            return 0.0
        return float(np.max(np.abs(self.gram() - np.eye(self.rank))))

    def sorted(self):
        """Copy with modes ordered by descending ``|sigma|`` (stable)."""
        order = np.argsort(-np.abs(self.sigma), kind="stable")
        return self.permuted(order)

    def permuted(self, order):
        order = np.asarray(order)
        return EgfModel(self.grid, self.phi[:, order], self.sigma[order], self.theta,
                        self.provenance, dict(self.info))

    def truncated(self, k):
        return EgfModel(self.grid, self.phi[:, :k], self.sigma[:k], self.theta,
                        self.provenance, dict(self.info))


def apply(model, f):
    """Response ``Phi diag(sigma) Phi^T W f`` to a forcing vector (or matrix of forcings)."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != model.grid.size:
        raise ShapeError(f"forcing has {f.shape[0]} entries, model has {model.grid.size} sensors")
    w = model.grid.weights
    c = model.phi.T @ (w[:, None] * f if f.ndim == 2 else w * f)
    c = model.sigma[:, None] * c if f.ndim == 2 else model.sigma * c
    return model.phi @ c


def densify(model, limit=DENSIFY_LIMIT):
    """Dense symmetric Green's matrix ``Phi diag(sigma) Phi^T``."""
    n = model.grid.size
    if n > limit:
        raise TooLargeError(f"refusing to densify {n} x {n} (limit {limit})")
    G = (model.phi * model.sigma) @ model.phi.T
    return 0.5 * (G + G.T)


def _as_dense(ref, grid):
    if isinstance(ref, EgfModel):
        return densify(ref), False
    if callable(ref):
        return ref.matrix(grid), bool(getattr(ref, "singular_diagonal", False))
    G = np.asarray(ref, dtype=float)
    if G.shape != (grid.size, grid.size):
        raise ShapeError(f"reference kernel {G.shape} does not match {grid.size} sensors")
    return G, False


def weighted_l2(G, grid, exclude_diagonal=False):
    """Discrete ``L2(Omega x Omega)`` norm with tensor weights ``w_i w_j``."""
    sw = grid.sqrt_weights
    S = sw[:, None] * G * sw[None, :]
    if exclude_diagonal:
        S = S.copy()
        np.fill_diagonal(S, 0.0)
    return float(np.linalg.norm(S))


def relative_kernel_error(model, exact, exclude_diagonal=None):
    """Relative L2 distance between the model and a reference kernel, in percent.

    ``exact`` may be an :class:`~egf.solvers.ExactKernel`, another
    :class:`EgfModel` on the same grid, or a dense matrix. Diagonal terms are
    dropped when the reference has a pole there (or on request).
    """
    grid = model.grid
    G_ref, pole = _as_dense(exact, grid)
    if exclude_diagonal is None:
        exclude_diagonal = pole
    G = densify(model)
    num = weighted_l2(G - G_ref, grid, exclude_diagonal)
    den = weighted_l2(G_ref, grid, exclude_diagonal)
    return 100.0 * num / den


@dataclass
class ErrorReport:
    """Error metrics of one model. ``test_error`` is a fraction; ``kernel_error`` a percent."""

    test_error: float | None = None
    per_sample_errors: np.ndarray = field(default_factory=lambda: np.empty(0))
    kernel_error: float | None = None
    n_excluded: int = 0

    @property
    def test_error_percent(self):
        return None if self.test_error is None else 100.0 * self.test_error

    def as_dict(self):
        return {
            "kernel_error_pct": self.kernel_error,
            "test_error": self.test_error,
            "test_error_pct": self.test_error_percent,
            "n_test": int(self.per_sample_errors.size),
            "n_excluded": self.n_excluded,
        }


def test_error(model, test_F, test_E):
    """Mean relative W-norm error of the model's predictions on a test ensemble."""
    F = getattr(test_F, "matrix", test_F)
    U = getattr(test_E, "matrix", test_E)
    if F.shape != U.shape or F.shape[0] != model.grid.size:
        raise ShapeError(f"test forcings {F.shape} and responses {U.shape} are inconsistent")
    pred = apply(model, F)
    norms = model.grid.norm(U)
    ok = norms > 0
    n_bad = int(np.count_nonzero(~ok))
    if n_bad:
        warnings.warn(f"{n_bad} test responses have zero norm and were excluded", RuntimeWarning)
    errs = model.grid.norm(U[:, ok] - pred[:, ok]) / norms[ok]
    mean = float(errs.mean()) if errs.size else float("nan")
    return ErrorReport(test_error=mean, per_sample_errors=errs, n_excluded=n_bad)


test_error.__test__ = False  # not a pytest test when imported into test modules
