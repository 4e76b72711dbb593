"""Sensor grids and the diagonal quadrature weights ``W``.

All L2-type inner products in the package are ``<u, v>_W = sum_i w_i u_i v_i``
over the sensor locations of a :class:`SensorGrid`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

DOMAINS = ("interval", "disk", "square")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SensorGrid:
    """Sensor locations and their quadrature weights.

    Parameters
    ----------
    points : array_like, shape (n, dim)
        Sensor coordinates. A 1D array is read as ``dim == 1``.
    weights : array_like, shape (n,)
        Positive quadrature weights (the diagonal of ``W``).
    domain : {"interval", "disk", "square"}
        Declared domain. ``"disk"`` is the open unit disk, ``"square"`` the
        unit square.
    bounds : tuple of float
        ``(a, b)`` for interval domains; ignored otherwise.
    """

    points: np.ndarray
    weights: np.ndarray
    domain: str = "interval"
    bounds: tuple = field(default=(0.0, 1.0))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.ndim != 2 or pts.shape[0] != w.shape[0] or pts.shape[0] == 0:
            raise InvalidArgumentError(
                f"points {pts.shape} and weights {w.shape} do not describe a nonempty grid"
            )
        if self.domain not in DOMAINS:
            raise InvalidArgumentError(f"unknown domain {self.domain!r}")
        if np.any(w <= 0):
            raise InvalidArgumentError("quadrature weights must be strictly positive")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def size(self):
        return self.points.shape[0]

    def __len__(self):
        return self.size

    @property
    def x(self):
        """Coordinates of a 1D grid as a flat array."""
        return self.points[:, 0]

    @property
    def sqrt_weights(self):
        return np.sqrt(self.weights)

    @property
    def measure(self):
        """Measure of the declared domain."""
        if self.domain == "interval":
            a, b = self.bounds
            return b - a
        if self.domain == "disk":
            return np.pi
        return 1.0

    def contains(self, pts=None):
        pts = self.points if pts is None else np.atleast_2d(pts)
        if self.domain == "interval":
            a, b = self.bounds
            return (pts[:, 0] >= a) & (pts[:, 0] <= b)
        if self.domain == "disk":
            return np.einsum("ij,ij->i", pts, pts) < 1.0
        return np.all((pts >= 0.0) & (pts <= 1.0), axis=1)

    def check(self, rtol=0.03):
        """Raise if the grid violates its invariants (positivity, containment, total weight)."""
        if not np.all(self.contains()):
            raise InvalidArgumentError("grid has points outside its declared domain")
        total = self.weights.sum()
        if abs(total - self.measure) > rtol * self.measure:
            raise InvalidArgumentError(
                f"weights sum to {total:.6g}, domain measure is {self.measure:.6g}"
            )

    def inner(self, u, v):
        """W-weighted inner product(s); columns of 2D inputs are paired."""
        return np.einsum("i,i...,i...->...", self.weights, u, v)

    def norm(self, u):
        u = np.asarray(u, dtype=float)
        return np.sqrt(np.einsum("i,i...->...", self.weights, u * u))

    def same_as(self, other):
        return (
            self is other
            or (
                self.domain == other.domain
                and self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights)
            )
        )

    def describe(self):
        return {"domain": self.domain, "bounds": list(self.bounds), "size": self.size, "dim": self.dim}


def make_interval_grid(a, b, n):
    """Uniform grid on ``[a, b]`` with ``n`` points (endpoints included) and trapezoidal weights."""
    if int(n) != n or n < 3:
        raise InvalidArgumentError(f"interval grid needs n >= 3 points, got {n!r}")
    if not a < b:
        raise InvalidArgumentError(f"interval grid needs a < b, got a={a!r}, b={b!r}")
    n = int(n)
    x = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return SensorGrid(x, w, "interval", (a, b))


def make_disk_grid(h):
    """Cartesian lattice of spacing ``h`` restricted to the open unit disk.

    Every retained point carries the full cell area ``h**2``; boundary cells
    are not clipped, so the total weight is accurate to O(h).
    """
    if not 0 < h < 0.5:
        raise InvalidArgumentError(f"disk grid needs 0 < h < 0.5, got {h!r}")
    m = int(np.floor(1.0 / h + 1e-12))
    t = h * np.arange(-m, m + 1)
    X, Y = np.meshgrid(t, t, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    keep = np.einsum("ij,ij->i", pts, pts) < 1.0 - 1e-12
    pts = pts[keep]
    return SensorGrid(pts, np.full(len(pts), h * h), "disk", (0.0, 1.0))


def make_square_grid(n_per_side):
    """``n x n`` lattice on the closed unit square with tensor trapezoidal weights.

    Boundary nodes are kept (as on interval grids) so the weights sum to 1;
    Dirichlet solvers return zero there.
    """
    if int(n_per_side) != n_per_side or n_per_side < 3:
        raise InvalidArgumentError(f"square grid needs n_per_side >= 3, got {n_per_side!r}")
    n = int(n_per_side)
    h = 1.0 / (n - 1)
    t = np.linspace(0.0, 1.0, n)
    w1 = np.full(n, h)
    w1[0] = w1[-1] = h / 2
    X, Y = np.meshgrid(t, t, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return SensorGrid(pts, np.outer(w1, w1).ravel(), "square", (0.0, 1.0))
