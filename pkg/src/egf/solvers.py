"""Forward solvers for the benchmark operators, exact kernels and the noise model.

Every problem is solved on its sensor grid, so a solver maps a forcing
matrix ``F`` (sensors x samples) to a response matrix ``E`` of the same
shape. Dirichlet problems use second-order central differences on the
interior nodes with the boundary response fixed at zero; the forcing at
boundary nodes is ignored. The resulting solution operators are symmetric in
the W inner product, which is what the two-pass randomized learner relies
on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import InvalidArgumentError, PoleError, ResonanceError, ShapeError
from .forcing import standard_normal_columns
from .grid import SensorGrid

POISSON_1D = "poisson1d"
HELMHOLTZ_1D = "helmholtz1d"
AIRY_1D = "airy1d"
MULTIPHYSICS_1D = "multiphysics1d"
FRACTIONAL_1D = "fractional1d"
POISSON_DISK = "poisson2d_disk"
HELMHOLTZ_SQUARE = "helmholtz2d_square"

KINDS = (
    POISSON_1D,
    HELMHOLTZ_1D,
    AIRY_1D,
    MULTIPHYSICS_1D,
    FRACTIONAL_1D,
    POISSON_DISK,
    HELMHOLTZ_SQUARE,
)
PARAMETRIC = {HELMHOLTZ_1D, AIRY_1D, MULTIPHYSICS_1D, FRACTIONAL_1D, HELMHOLTZ_SQUARE}
_DOMAIN_OF = {
    POISSON_1D: "interval",
    HELMHOLTZ_1D: "interval",
    AIRY_1D: "interval",
    MULTIPHYSICS_1D: "interval",
    FRACTIONAL_1D: "interval",
    POISSON_DISK: "disk",
    HELMHOLTZ_SQUARE: "square",
}

RESONANCE_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    kind: str
    grid: SensorGrid
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown problem kind {self.kind!r}; expected one of {KINDS}")
        if self.grid.domain != _DOMAIN_OF[self.kind]:
            raise InvalidArgumentError(
                f"{self.kind} needs a {_DOMAIN_OF[self.kind]} grid, got {self.grid.domain}"
            )
        if self.kind in PARAMETRIC:
            if self.theta is None:
                raise InvalidArgumentError(f"{self.kind} requires a parameter theta")
            object.__setattr__(self, "theta", float(self.theta))
        if self.kind == FRACTIONAL_1D and not 0.0 < self.theta <= 1.0:
            raise InvalidArgumentError(f"fractional order must lie in (0, 1], got {self.theta}")

    def describe(self):
        return {"kind": self.kind, "theta": self.theta, "grid": self.grid.describe()}


@dataclass(frozen=True)
class NoiseConfig:
    level: float
    seed: int = 0

    def __post_init__(self):
        if not self.level >= 0:
            raise InvalidArgumentError(f"noise level must be nonnegative, got {self.level!r}")


@dataclass(frozen=True, eq=False)
class ResponseEnsemble:
    grid: SensorGrid
    matrix: np.ndarray
    problem: ProblemSpec | None = None
    noise: NoiseConfig | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim == 1:
            m = m[:, None]
        if m.shape[0] != self.grid.size:
            raise InvalidArgumentError(
                f"response matrix {m.shape} does not fit a grid of {self.grid.size} sensors"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def n_samples(self):
        return self.matrix.shape[1]


# --- discretizations ---------------------------------------------------------


def _second_difference(m, h):
    """Dirichlet second-difference matrix on ``m`` interior nodes (negative definite)."""
    e = np.ones(m)
    return sp.diags([e[:-1], -2.0 * e, e[:-1]], [-1, 0, 1], format="csc") / (h * h)


def _laplacian_eigenvalues(m, h):
    """Eigenvalues of minus the Dirichlet second difference on ``m`` interior nodes."""
    k = np.arange(1, m + 1)
    return 4.0 / (h * h) * np.sin(k * np.pi / (2 * (m + 1))) ** 2


def _check_resonance(theta, lams):
    t2 = theta * theta
    rel = np.abs(t2 - lams) / lams
    i = int(np.argmin(rel))
    if rel[i] < RESONANCE_RTOL:
        raise ResonanceError(theta, float(np.sqrt(lams[i])))


def _uniform_spacing(grid):
    x = grid.x
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-9, atol=0):
        raise InvalidArgumentError("finite-difference solvers need a uniform interval grid")
    return h


def _dirichlet_1d(grid, kind, theta):
    x = grid.x
    n = len(x)
    h = _uniform_spacing(grid)
    m = n - 2
    D2 = _second_difference(m, h)
    xi = x[1:-1]
    if kind == POISSON_1D:
        A = -D2
    elif kind == HELMHOLTZ_1D:
        _check_resonance(theta, _laplacian_eigenvalues(m, h))
        A = D2 + theta * theta * sp.identity(m, format="csc")
    elif kind == AIRY_1D:
        A = D2 - theta * theta * sp.diags(xi, format="csc")
    else:
        raise AssertionError(kind)
    lu = splu(sp.csc_matrix(A))

    def solve(F):
        U = np.zeros_like(F)
        U[1:-1] = lu.solve(np.ascontiguousarray(F[1:-1]))
        return U

    return solve


def _multiphysics(grid, theta):
    x = grid.x
    n = len(x)
    h = _uniform_spacing(grid)
    a, b = grid.bounds
    split = a + (b - a) / 4.0
    mid = int(np.argmin(np.abs(x - split)))
    if abs(x[mid] - split) > h / 2 + 1e-12 or not 2 <= mid <= n - 3:
        raise InvalidArgumentError("grid must have a node within h/2 of the interface at x=1/4")
    m_left, m_right = mid - 1, n - mid - 2
    _check_resonance(theta, _laplacian_eigenvalues(m_left, h))
    # 1/2 (u'' + theta^2 u) = f  <=>  (D2 + theta^2) u = 2 f
    left = splu(sp.csc_matrix(_second_difference(m_left, h) + theta * theta * sp.identity(m_left)))
    right = splu(sp.csc_matrix(-_second_difference(m_right, h)))

    def solve(F):
        U = np.zeros_like(F)
        U[1:mid] = left.solve(np.ascontiguousarray(2.0 * F[1:mid]))
        U[mid + 1 : -1] = right.solve(np.ascontiguousarray(F[mid + 1 : -1]))
        return U

    return solve


def _fractional(grid, theta):
    # The interval endpoints are one periodic node: its forcing is the mean of
    # the two endpoint samples and its response is written to both ends.
    x = grid.x
    h = _uniform_spacing(grid)
    N = len(x) - 1
    omega = 2.0 * np.pi * np.fft.rfftfreq(N, d=h)
    symbol = np.zeros_like(omega)
    symbol[1:] = np.abs(omega[1:]) ** (-2.0 * theta)

    def solve(F):
        G = F[:-1].copy()
        G[0] = 0.5 * (F[0] + F[-1])
        U = np.fft.irfft(symbol[:, None] * np.fft.rfft(G, axis=0), n=N, axis=0)
        return np.vstack([U, U[:1]])

    return solve


def _helmholtz_square(grid, theta):
    n = int(round(np.sqrt(grid.size)))
    if n * n != grid.size or n < 3:
        raise InvalidArgumentError("square Helmholtz solver needs a full n x n lattice")
    m = n - 2
    h = 1.0 / (n - 1)
    lam1 = _laplacian_eigenvalues(m, h)
    _check_resonance(theta, (lam1[:, None] + lam1[None, :]).ravel())
    D2 = _second_difference(m, h)
    I = sp.identity(m, format="csc")
    A = sp.kron(D2, I) + sp.kron(I, D2) + theta * theta * sp.identity(m * m)
    lu = splu(sp.csc_matrix(A))
    interior = np.zeros((n, n), dtype=bool)
    interior[1:-1, 1:-1] = True
    interior = interior.ravel()

    def solve(F):
        U = np.zeros_like(F)
        U[interior] = lu.solve(np.ascontiguousarray(F[interior]))
        return U

    return solve


def _poisson_disk(grid):
    G = disk_kernel(grid.points[:, None, :], grid.points[None, :, :], exclude_pole=True)
    GW = G * grid.weights[None, :]
    return lambda F: GW @ F


def make_solver(problem):
    """Factor the discrete operator of ``problem`` once and return ``solve(F) -> E``.

    The returned callable accepts a vector or a sensors x samples matrix.
    """
    kind, grid, theta = problem.kind, problem.grid, problem.theta
    if kind in (POISSON_1D, HELMHOLTZ_1D, AIRY_1D):
        inner = _dirichlet_1d(grid, kind, theta)
    elif kind == MULTIPHYSICS_1D:
        inner = _multiphysics(grid, theta)
    elif kind == FRACTIONAL_1D:
        inner = _fractional(grid, theta)
    elif kind == HELMHOLTZ_SQUARE:
        inner = _helmholtz_square(grid, theta)
    else:
        inner = _poisson_disk(grid)
    n = grid.size

    def solve(F):
        F = np.asarray(F, dtype=float)
        vec = F.ndim == 1
        F2 = F[:, None] if vec else F
        if F2.shape[0] != n:
            raise ShapeError(f"forcing has {F2.shape[0]} rows, grid has {n} sensors")
        U = inner(F2)
        return U[:, 0] if vec else U

    return solve


def solve_ensemble(problem, F, solve=None):
    """Responses of ``problem`` to every column of the forcing ensemble."""
    if not F.grid.same_as(problem.grid):
        raise InvalidArgumentError("forcing ensemble and problem live on different grids")
    solve = solve or make_solver(problem)
    return ResponseEnsemble(problem.grid, solve(F.matrix), problem)


# --- exact kernels -------------------------------------------------------------


class ExactKernel:
    """Closed-form Green's function ``G(x, s)``; ``singular_diagonal`` marks a pole at ``x == s``."""

    def __init__(self, fn, singular_diagonal=False, name=""):
        self._fn = fn
        self.singular_diagonal = singular_diagonal
        self.name = name

    def __call__(self, x, s):
        return self._fn(x, s)

    def matrix(self, grid):
        """Kernel sampled at all sensor pairs; pole entries (if any) are set to 0."""
        if grid.dim == 1:
            x = grid.x
            if self.singular_diagonal:
                raise AssertionError("1D kernels here are continuous")
            return self._fn(x[:, None], x[None, :])
        P = grid.points
        return disk_kernel(P[:, None, :], P[None, :, :], exclude_pole=True)


def poisson1d_kernel(a=0.0, b=1.0):
    L = b - a

    def G(x, s):
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        lo = np.minimum(x, s) - a
        hi = b - np.maximum(x, s)
        return lo * hi / L

    return ExactKernel(G, name="poisson1d")


def disk_kernel(x, s, exclude_pole=False):
    """Green's function of the Laplacian on the unit disk with zero boundary values.

    ``x`` and ``s`` broadcast against each other with a trailing axis of
    length 2. With ``exclude_pole`` coincident pairs evaluate to 0 instead of
    raising :class:`PoleError`.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    s1, s2 = s[..., 0], s[..., 1]
    num = (x1 - s1) ** 2 + (x2 - s2) ** 2
    den = (x1 * s2 - x2 * s1) ** 2 + (x1 * s1 + x2 * s2 - 1.0) ** 2
    pole = num == 0.0
    if np.any(pole) and not exclude_pole:
        raise PoleError("disk Green's function is singular at x == s")
    with np.errstate(divide="ignore"):
        G = np.log(np.where(pole, 1.0, num) / den) / (4.0 * np.pi)
    return np.where(pole, 0.0, G)


def exact_kernel(problem):
    """Closed-form kernel for Poisson problems, ``None`` for the other operators."""
    if problem.kind == POISSON_1D:
        return poisson1d_kernel(*problem.grid.bounds)
    if problem.kind == POISSON_DISK:
        return ExactKernel(disk_kernel, singular_diagonal=True, name="poisson2d_disk")
    return None


# --- noise ----------------------------------------------------------------------


def perturb(U, cfg, offset=0):
    """``U + level * c_ij * mean_i |U_ij|`` with i.i.d. standard normal ``c``, seeded per column."""
    if cfg.level == 0:
        return U
    scale = np.mean(np.abs(U), axis=0)
    C = standard_normal_columns(U.shape[0], U.shape[1], cfg.seed, offset)
    return U + cfg.level * C * scale[None, :]


def add_noise(E, cfg):
    """Noisy copy of a response ensemble; ``level == 0`` returns the input unchanged."""
    if cfg.level == 0:
        return E
    return ResponseEnsemble(E.grid, perturb(E.matrix, cfg), E.problem, cfg)


def noisy(solve, cfg):
    """Wrap a solver so every call returns noisy responses.

    Successive calls draw fresh noise: call ``k`` uses columns offset by the
    number of columns already produced.
    """
    if cfg is None or cfg.level == 0:
        return solve
    produced = [0]

    def wrapped(F):
        U = solve(F)
        vec = U.ndim == 1
        U2 = U[:, None] if vec else U
        out = perturb(U2, cfg, offset=produced[0])
        produced[0] += U2.shape[1]
        return out[:, 0] if vec else out

    return wrapped
