"""Uniform structured grids, modal Legendre bases and Gauss quadrature.

Everything here lives on the reference cell [-1, 1] (per direction); the
affine map to a physical cell carries a 2/h factor for each derivative.
All objects are immutable after construction and safe to share.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PERIODIC = "periodic"
DIRICHLET = "dirichlet"
COMPACT_ZERO = "compact_zero"

_BOUNDARY_KINDS = (PERIODIC, DIRICHLET, COMPACT_ZERO)


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary treatment for one axis.

    ``dirichlet`` carries the prescribed ghost states; ``compact_zero`` is a
    zero ghost state (compactly supported data), ``periodic`` wraps.
    """

    kind: str
    left_value: float = 0.0
    right_value: float = 0.0

    def __post_init__(self):
        if self.kind not in _BOUNDARY_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")

    @property
    def is_periodic(self) -> bool:
        return self.kind == PERIODIC


@dataclass(frozen=True)
class Grid1D:
    """N uniform cells covering [a, b]; cell j is [a + j*h, a + (j+1)*h)."""

    a: float
    b: float
    n: int
    boundary: BoundaryCondition

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    def interfaces(self) -> np.ndarray:
        """All N+1 interface coordinates, reproducible as a + j*h."""
        return self.a + np.arange(self.n + 1) * self.h

    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n) + 0.5) * self.h


@dataclass(frozen=True)
class Grid2D:
    """Tensor product of two 1D layouts; cell (i, j) = I_i x J_j."""

    x: Grid1D
    y: Grid1D

    @property
    def nx(self) -> int:
        return self.x.n

    @property
    def ny(self) -> int:
        return self.y.n

    @property
    def hx(self) -> float:
        return self.x.h

    @property
    def hy(self) -> float:
        return self.y.h


def build_grid_1d(a: float, b: float, n: int,
                  boundary: BoundaryCondition | str = PERIODIC) -> Grid1D:
    if isinstance(boundary, str):
        boundary = BoundaryCondition(boundary)
    if n < 1:
        raise ValueError(f"cell count must be >= 1, got {n}")
    if not b > a:
        raise ValueError(f"domain must satisfy b > a, got [{a}, {b}]")
    return Grid1D(a=float(a), b=float(b), n=int(n), boundary=boundary)


def build_grid_2d(x_range, y_range, nx: int, ny: int,
                  x_boundary: BoundaryCondition | str = PERIODIC,
                  y_boundary: BoundaryCondition | str = PERIODIC) -> Grid2D:
    return Grid2D(
        x=build_grid_1d(x_range[0], x_range[1], nx, x_boundary),
        y=build_grid_1d(y_range[0], y_range[1], ny, y_boundary),
    )


def legendre_eval(k: int, xhat) -> tuple[np.ndarray, np.ndarray]:
    """Values and d/dxhat of Legendre modes 0..k at reference points.

    Returns arrays of shape (k+1,) + shape(xhat). Out-of-range points are
    the caller's responsibility; no clamping is applied.
    """
    xhat = np.asarray(xhat, dtype=float)
    vals = np.empty((k + 1,) + xhat.shape)
    ders = np.empty_like(vals)
    vals[0] = 1.0
    ders[0] = 0.0
    if k >= 1:
        vals[1] = xhat
        ders[1] = 1.0
    for m in range(2, k + 1):
        vals[m] = ((2 * m - 1) * xhat * vals[m - 1] - (m - 1) * vals[m - 2]) / m
        ders[m] = (2 * m - 1) * vals[m - 1] + ders[m - 2]
    return vals, ders


def legendre_second_derivative(k: int, xhat) -> np.ndarray:
    """d2/dxhat2 of Legendre modes 0..k, from the derivative recurrence."""
    xhat = np.asarray(xhat, dtype=float)
    _, ders = legendre_eval(k, xhat)
    dd = np.empty_like(ders)
    dd[0] = 0.0
    if k >= 1:
        dd[1] = 0.0
    for m in range(2, k + 1):
        dd[m] = (2 * m - 1) * ders[m - 1] + dd[m - 2]
    return dd


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]: exact through degree 2n-1."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> QuadratureRule:
    if not 1 <= n <= 10:
        raise ValueError(f"supported Gauss rules have 1..10 nodes, got {n}")
    nodes, weights = np.polynomial.legendre.leggauss(n)
    # exactness audit: monomials up to degree 2n-1 against the closed form
    for d in range(2 * n):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        got = float(weights @ nodes**d)
        if abs(got - exact) > 1e-13:
            raise AssertionError(f"Gauss rule n={n} missed x^{d}: {got} vs {exact}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


def total_degree_modes(k: int) -> list[tuple[int, int]]:
    """P^k mode index pairs (m, n), m+n <= k, graded order; (0,0) first."""
    return [(m, d - m) for d in range(k + 1) for m in range(d, -1, -1)]


@dataclass(frozen=True)
class Basis:
    """Modal Legendre basis of degree k on the reference cell.

    Mode 0 is the constant 1, so coefficient 0 of an L2 projection is the
    cell average. In 2D the total-degree space P^k is used, with modes
    phi_{mn}(x, y) = P_m(x) P_n(y), m + n <= k.
    """

    k: int
    dim: int  # spatial dimension, 1 or 2

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("polynomial degree must be >= 0")
        if self.dim not in (1, 2):
            raise ValueError("basis dimension must be 1 or 2")

    @property
    def n_modes(self) -> int:
        if self.dim == 1:
            return self.k + 1
        return (self.k + 1) * (self.k + 2) // 2

    @property
    def mode_pairs(self) -> list[tuple[int, int]]:
        if self.dim != 2:
            raise ValueError("mode pairs only defined for the 2D basis")
        return total_degree_modes(self.k)

    def norms(self) -> np.ndarray:
        """Reference-cell L2 norms of each mode (the normalization constants)."""
        if self.dim == 1:
            return 2.0 / (2 * np.arange(self.k + 1) + 1)
        pairs = np.array(self.mode_pairs)
        return (2.0 / (2 * pairs[:, 0] + 1)) * (2.0 / (2 * pairs[:, 1] + 1))
