"""Interpolation of learned models across a scalar parameter on the Grassmann manifold.

Pipeline for a target parameter ``theta*``:

1. the knot nearest ``theta*`` becomes the origin;
2. knot modes are matched to the origin's (greedy, largest overlap first)
   and their signs aligned;
3. ``Psi = W^{1/2} Phi`` is lifted to the horizontal tangent space at the
   origin, ``Gamma = Psi - Psi0 sym(Psi0^T Psi)``;
4. tangent vectors and coefficient vectors are interpolated with the same
   Lagrange scheme;
5. the result is retracted with a sign-normalized QR, ``qf(Psi0 + Gamma*)``,
   and mapped back with ``W^{-1/2}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError, RankError, ShapeError
from .model import EgfModel

LAGRANGE = "lagrange"
LINEAR = "linear"
SCHEMES = (LAGRANGE, LINEAR)


@dataclass(frozen=True, eq=False)
class InterpolationSet:
    knots: tuple
    target_theta: float

    def __post_init__(self):
        knots = tuple(self.knots)
        if len(knots) < 2:
            raise InvalidArgumentError("interpolation needs at least two knots")
        g0 = knots[0].grid
        for m in knots[1:]:
            if not m.grid.same_as(g0):
                raise InvalidArgumentError("all knots must share one sensor grid")
            if m.rank != knots[0].rank:
                raise InvalidArgumentError("all knots must have the same rank")
        thetas = [m.theta for m in knots]
        if any(t is None for t in thetas):
            raise InvalidArgumentError("every knot needs a parameter value")
        if len(set(thetas)) != len(thetas):
            raise InvalidArgumentError(f"knot parameters must be distinct, got {thetas}")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "target_theta", float(self.target_theta))

    @property
    def thetas(self):
        return np.array([m.theta for m in self.knots], dtype=float)

    @property
    def grid(self):
        return self.knots[0].grid

    def replace(self, knots):
        return InterpolationSet(tuple(knots), self.target_theta)


def select_origin(iset):
    """Index of the knot nearest the target; ties go to the smaller parameter."""
    th = iset.thetas
    d = np.abs(th - iset.target_theta)
    best = np.flatnonzero(d == d.min())
    return int(best[np.argmin(th[best])])


def _sign_flips(phi, phi_ref, w):
    ip = np.einsum("i,ik,ik->k", w, phi, phi_ref)
    return np.where(ip < 0, -1.0, 1.0)


def _match(phi, phi_ref, w):
    """Greedy assignment: for each reference mode in order, the unclaimed mode of largest |overlap|."""
    overlap = np.abs(phi_ref.T @ (w[:, None] * phi))
    K = overlap.shape[0]
    perm = np.empty(K, dtype=int)
    free = np.ones(K, dtype=bool)
    for k in range(K):
        row = np.where(free, overlap[k], -np.inf)
        j = int(np.argmax(row))
        perm[k] = j
        free[j] = False
    return perm


def _with(model, phi, sigma):
    return EgfModel(model.grid, phi, sigma, model.theta, model.provenance, dict(model.info))


def align_signs(iset, origin):
    """Negate knot modes whose W-inner product with the origin's same-index mode is negative."""
    w = iset.grid.weights
    ref = iset.knots[origin].phi
    out = []
    for j, m in enumerate(iset.knots):
        if j == origin:
            out.append(m)
            continue
        s = _sign_flips(m.phi, ref, w)
        out.append(_with(m, m.phi * s, m.sigma))
    return iset.replace(out)


def match_modes(iset, origin):
    """Reorder each knot's modes (and coefficients) to follow the origin's modes."""
    w = iset.grid.weights
    ref = iset.knots[origin].phi
    out = []
    for j, m in enumerate(iset.knots):
        if j == origin:
            out.append(m)
            continue
        perm = _match(m.phi, ref, w)
        out.append(_with(m, m.phi[:, perm], m.sigma[perm]))
    return iset.replace(out)


def _sym(Y):
    return 0.5 * (Y + Y.T)


def lift(knot, origin):
    """Horizontal tangent vector at the origin pointing towards ``knot``."""
    if knot.phi.shape != origin.phi.shape or not knot.grid.same_as(origin.grid):
        raise ShapeError("knot and origin must share grid and rank")
    sw = origin.grid.sqrt_weights[:, None]
    Psi0 = sw * origin.phi
    Psi = sw * knot.phi
    return Psi - Psi0 @ _sym(Psi0.T @ Psi)


def lagrange_weights(thetas, target, scheme=LAGRANGE):
    """Weights ``l_j`` with ``value(target) = sum_j l_j value_j``.

    ``"lagrange"`` uses the polynomial through all knots; ``"linear"`` the
    two bracketing knots, or the two nearest ones outside the knot range.
    """
    th = np.asarray(thetas, dtype=float)
    n = th.size
    if n < 2:
        raise InvalidArgumentError("interpolation needs at least two knots")
    if len(set(th.tolist())) != n:
        raise InvalidArgumentError("knot parameters must be distinct")
    lw = np.zeros(n)
    if scheme == LAGRANGE:
        for j in range(n):
            others = np.delete(th, j)
            lw[j] = np.prod((target - others) / (th[j] - others))
        return lw
    if scheme != LINEAR:
        raise InvalidArgumentError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    order = np.argsort(th)
    ts = th[order]
    if target <= ts[0]:
        a, b = 0, 1
    elif target >= ts[-1]:
        a, b = n - 2, n - 1
    else:
        b = int(np.searchsorted(ts, target, side="right"))
        a = b - 1
        if ts[a] == target:
            lw[order[a]] = 1.0
            return lw
    t = (target - ts[a]) / (ts[b] - ts[a])
    lw[order[a]] = 1.0 - t
    lw[order[b]] = t
    return lw


def interpolate_tangent(gammas, thetas, target, scheme=LAGRANGE):
    """Entrywise interpolation of tangent vectors (or any same-shape arrays)."""
    lw = lagrange_weights(thetas, target, scheme)
    return sum(l * np.asarray(g) for l, g in zip(lw, gammas))


def retract(origin, gamma):
    """``qf(Psi0 + Gamma)`` with the convention ``R_ii >= 0``; returns an orthonormal ``Psi``."""
    Psi0 = origin.grid.sqrt_weights[:, None] * origin.phi
    A = Psi0 + gamma
    Q, R = scipy.linalg.qr(A, mode="economic", check_finite=False)
    d = np.diag(R)
    if d.size and np.min(np.abs(d)) <= 1e-12 * np.max(np.abs(d)):
        raise RankError("origin basis plus interpolated tangent vector is rank deficient")
    return Q * np.where(d < 0, -1.0, 1.0)


def interpolate_egf(iset, scheme=LAGRANGE):
    """Model at ``iset.target_theta`` interpolated from the knots."""
    o = select_origin(iset)
    iset = align_signs(iset, o)
    iset = match_modes(iset, o)
    iset = align_signs(iset, o)
    origin = iset.knots[o]
    gammas = [lift(m, origin) for m in iset.knots]
    target = iset.target_theta
    gamma = interpolate_tangent(gammas, iset.thetas, target, scheme)
    sigma = interpolate_tangent([m.sigma for m in iset.knots], iset.thetas, target, scheme)
    Psi = retract(origin, gamma)
    sw = iset.grid.sqrt_weights[:, None]
    phi = Psi / sw
    # order the output after the origin's modes
    w = iset.grid.weights
    perm = _match(phi, origin.phi, w)
    phi, sigma = phi[:, perm], sigma[perm]
    info = {
        "knot_thetas": iset.thetas.tolist(),
        "origin_theta": float(origin.theta),
        "scheme": scheme,
    }
    return EgfModel(iset.grid, phi, sigma, target, "interpolated", info).sorted()
