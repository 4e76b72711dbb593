"""Single-pass learner: POD modes of the responses plus a diagonal least-squares fit."""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import DegenerateError, InvalidArgumentError, RankError
from .model import EgfModel

RANK_TOL = 1e-12


def _matrix(ens):
    return getattr(ens, "matrix", ens)


def resolve_method(method, shape):
    if method == "auto":
        return "gram" if min(shape) > 500 else "svd"
    return method


def pod_modes(E, rank, method="svd", strict=True):
    """W-orthonormal POD modes of a response ensemble.

    Parameters
    ----------
    E : ResponseEnsemble
    rank : int
        Number of modes ``K``.
    method : {"svd", "gram", "auto"}
        ``"svd"`` takes a thin SVD of ``W^{1/2} E``. ``"gram"`` computes only
        the leading ``K`` eigenpairs of ``(W^{1/2} E)(W^{1/2} E)^T``, which is
        several times faster for square ensembles and loses accuracy only in
        modes whose singular values are below ~1e-8 of the largest.
        ``"auto"`` picks ``"gram"`` when both dimensions exceed 500.
    strict : bool
        If true, an ensemble of numerical rank below ``rank`` raises
        :class:`RankError`; otherwise only the resolvable modes are returned.

    Returns
    -------
    phi : ndarray, shape (n_sensors, rank)
    s : ndarray
        Singular values of ``W^{1/2} E`` (all of them for ``"svd"``, the
        leading ``rank`` for ``"gram"``), for choosing the rank.
    """
    grid = E.grid
    M = _matrix(E)
    n, m = M.shape
    if int(rank) != rank or not 1 <= rank <= min(n, m):
        raise InvalidArgumentError(f"rank must lie in [1, {min(n, m)}], got {rank!r}")
    method = resolve_method(method, M.shape)
    sw = grid.sqrt_weights
    A = sw[:, None] * M
    if method == "svd":
        U, s, _ = scipy.linalg.svd(A, full_matrices=False, check_finite=False)
        U = U[:, :rank]
    elif method == "gram":
        lam, V = scipy.linalg.eigh(A @ A.T, subset_by_index=[n - rank, n - 1], check_finite=False)
        lam, U = lam[::-1], V[:, ::-1]
        s = np.sqrt(np.clip(lam, 0.0, None))
    else:
        raise InvalidArgumentError(f"unknown POD method {method!r}")
    if s[0] == 0 or s[rank - 1] / s[0] <= RANK_TOL:
        if strict or s[0] == 0:
            raise RankError(
                f"response ensemble has numerical rank below {rank}; "
                "use a smaller rank or more (or more diverse) samples"
            )
        rank = int(np.count_nonzero(s[:rank] / s[0] > RANK_TOL))
        U = U[:, :rank]
    # fix the SVD sign ambiguity: largest-magnitude entry of each mode positive
    idx = np.argmax(np.abs(U), axis=0)
    U = U * np.sign(U[idx, np.arange(rank)])
    return U / sw[:, None], s


def fit_coefficients(phi, F, E):
    """Diagonal ``Z`` minimizing ``sum_i ||u_i - Phi Z Phi^T W f_i||_W^2``.

    With ``c_i = Phi^T W f_i`` and ``d_i = Phi^T W u_i`` the problem
    decouples per mode: ``Z_k = sum_i d_ik c_ik / sum_i c_ik^2``.
    """
    w = F.grid.weights
    C = phi.T @ (w[:, None] * _matrix(F))
    D = phi.T @ (w[:, None] * _matrix(E))
    den = np.einsum("ki,ki->k", C, C)
    num = np.einsum("ki,ki->k", D, C)
    dead = den == 0
    if np.all(dead):
        raise DegenerateError("every forcing has zero projection on every mode")
    if np.any(dead):
        warnings.warn(f"{int(dead.sum())} modes receive no forcing; their coefficient is set to 0",
                      RuntimeWarning)
    Z = np.zeros_like(den)
    Z[~dead] = num[~dead] / den[~dead]
    return Z


def learn_pod(F, E, rank, method="auto", theta=None, strict=True):
    """POD modes of ``E`` with fitted coefficients, ordered by descending ``|sigma|``.

    With ``strict=False`` the rank is lowered to the numerical rank of the
    ensemble instead of raising; ``info["requested_rank"]`` keeps the request.
    """
    if F.matrix.shape != E.matrix.shape:
        raise InvalidArgumentError(f"F {F.matrix.shape} and E {E.matrix.shape} differ in shape")
    if theta is None and getattr(E, "problem", None) is not None:
        theta = E.problem.theta
    phi, s = pod_modes(E, rank, method, strict)
    Z = fit_coefficients(phi, F, E)
    info = {"n_samples": F.n_samples, "pod_method": resolve_method(method, E.matrix.shape), "forcing_seed": F.seed,
            "requested_rank": int(rank)}
    return EgfModel(F.grid, phi, Z, theta, "pod", info).sorted()
