"""Two-pass randomized SVD learner with W-orthonormal modes.

Pass one sketches the range of the solution operator with the responses to
random forcings. Pass two probes the operator with the W-orthonormalized
sketch; because the operator is self-adjoint, those responses are the rows of
``B = Q~^T W G`` without an adjoint solve.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import DegenerateError, InvalidArgumentError, SolverError
from .model import EgfModel

SYMMETRY_TOL = 1e-6


class SelfAdjointnessWarning(RuntimeWarning):
    pass


def weighted_qr(E):
    """``Q~ = W^{-1/2} qf(W^{1/2} E)``: a W-orthonormal basis for the columns of ``E``."""
    M = getattr(E, "matrix", E)
    if not np.any(M):
        raise DegenerateError("cannot orthonormalize an all-zero response ensemble")
    sw = E.grid.sqrt_weights
    Q, _ = scipy.linalg.qr(sw[:, None] * M, mode="economic", check_finite=False)
    return Q / sw[:, None]


def learn_rsvd(F, rank, solve, E=None, theta=None, symmetry_tol=SYMMETRY_TOL):
    """Learn a rank-``rank`` model from two passes through ``solve``.

    Parameters
    ----------
    F : ForcingEnsemble
        Random forcings for the sketch. All columns are used, so
        ``F.n_samples - rank`` is the oversampling.
    rank : int
    solve : callable
        Forward oracle mapping a sensors x m forcing matrix to responses. It
        may add measurement noise; it is called once for pass two (and once
        for pass one when ``E`` is not supplied).
    E : ResponseEnsemble or ndarray, optional
        Pass-one responses to ``F`` if they are already available.
    symmetry_tol : float
        Relative asymmetry of the compressed operator ``Q~^T W G W Q~``
        above which a :class:`SelfAdjointnessWarning` is emitted.

    Returns
    -------
    EgfModel
        ``info["leakage"]`` is the largest off-diagonal entry of the leading
        ``rank x rank`` block of ``V~^T W U~ S`` relative to ``max |sigma|``
        (it tracks the sketch residual and falls with oversampling);
        ``info["asymmetry"]`` is the self-adjointness defect.
    """
    grid = F.grid
    n_samples = F.n_samples
    if int(rank) != rank or not 1 <= rank <= n_samples:
        raise InvalidArgumentError(f"rank must lie in [1, {n_samples}], got {rank!r}")
    if E is None:
        try:
            E_mat = solve(F.matrix)
        except Exception as exc:
            raise SolverError(f"pass 1 (sketch) solve failed: {exc}") from exc
    else:
        E_mat = getattr(E, "matrix", E)
        if theta is None and getattr(E, "problem", None) is not None:
            theta = E.problem.theta
    if E_mat.shape != F.matrix.shape:
        raise InvalidArgumentError(f"responses {E_mat.shape} do not match forcings {F.matrix.shape}")

    Qt = weighted_qr(_Wrapped(grid, E_mat))
    try:
        R2 = solve(Qt)
    except Exception as exc:
        raise SolverError(f"pass 2 (projection) solve failed: {exc}") from exc

    sw = grid.sqrt_weights
    C = Qt.T @ (grid.weights[:, None] * R2)
    asymmetry = float(np.max(np.abs(C - C.T)) / np.max(np.abs(C)))
    if asymmetry > symmetry_tol:
        warnings.warn(
            f"compressed operator is asymmetric ({asymmetry:.2e} > {symmetry_tol:.0e}); "
            "the operator may not be self-adjoint or the responses are noisy",
            SelfAdjointnessWarning,
        )
    # B = R2^T; svd(B W^{1/2})
    U, S, Vt = scipy.linalg.svd(R2.T * sw[None, :], full_matrices=False, check_finite=False)
    Ut = Qt @ U
    # Sigma = V~^T W U~ S with V~ = W^{-1/2} V
    M = (Vt @ (sw[:, None] * Ut)) * S[None, :]
    Mk = M[:rank, :rank]
    sigma = np.diag(Mk).copy()
    scale = np.max(np.abs(sigma)) if sigma.size else 0.0
    off = Mk - np.diag(sigma)
    leakage = float(np.max(np.abs(off)) / scale) if scale > 0 and rank > 1 else 0.0
    info = {"n_samples": n_samples, "forcing_seed": F.seed, "leakage": leakage,
            "asymmetry": asymmetry}
    return EgfModel(grid, Ut[:, :rank], sigma, theta, "rsvd", info).sorted()


class _Wrapped:
    def __init__(self, grid, matrix):
        self.grid = grid
        self.matrix = matrix
