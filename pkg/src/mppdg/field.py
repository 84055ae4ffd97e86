"""Modal DG fields on structured grids, L2 projection and point evaluation.

Coefficient layout: (n_cells, n_modes) in 1D and (nx, ny, n_modes) in 2D,
with mode 0 holding the cell average. Fields are treated as immutable;
operators return fresh coefficient arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import (
    Basis,
    Grid1D,
    Grid2D,
    gauss_rule,
    legendre_eval,
    legendre_second_derivative,
    total_degree_modes,
)


@lru_cache(maxsize=None)
def tables_1d(k: int, nq: int):
    """Quadrature nodes/weights and mode values at nodes and traces.

    Returns a dict with keys: x, w, P (k+1, nq), dP, ddP, P_left, P_right,
    dP_left, dP_right (trace values at xhat = -1, +1).
    """
    rule = gauss_rule(nq)
    P, dP = legendre_eval(k, rule.nodes)
    ddP = legendre_second_derivative(k, rule.nodes)
    ends = np.array([-1.0, 1.0])
    Pe, dPe = legendre_eval(k, ends)
    return {
        "x": rule.nodes, "w": rule.weights,
        "P": P, "dP": dP, "ddP": ddP,
        "P_left": Pe[:, 0].copy(), "P_right": Pe[:, 1].copy(),
        "dP_left": dPe[:, 0].copy(), "dP_right": dPe[:, 1].copy(),
    }


@lru_cache(maxsize=None)
def tables_2d(k: int, nq: int):
    """Tensor tables for the total-degree P^k basis at nq x nq Gauss points.

    Volume tables have shape (n_modes, nq, nq); trace tables (n_modes, nq)
    hold values along one edge at the Gauss points of the other direction.
    """
    rule = gauss_rule(nq)
    x = rule.nodes
    P, dP = legendre_eval(k, x)
    ddP = legendre_second_derivative(k, x)
    ends = np.array([-1.0, 1.0])
    Pe, dPe = legendre_eval(k, ends)
    pairs = total_degree_modes(k)
    nm = len(pairs)

    phi = np.empty((nm, nq, nq))
    dphix = np.empty_like(phi)
    dphiy = np.empty_like(phi)
    ddphixx = np.empty_like(phi)
    ddphiyy = np.empty_like(phi)
    tr = {name: np.empty((nm, nq)) for name in
          ("phi_xm", "phi_xp", "phi_ym", "phi_yp",
           "dphix_xm", "dphix_xp", "dphiy_ym", "dphiy_yp")}
    for a, (m, n) in enumerate(pairs):
        phi[a] = np.outer(P[m], P[n])
        dphix[a] = np.outer(dP[m], P[n])
        dphiy[a] = np.outer(P[m], dP[n])
        ddphixx[a] = np.outer(ddP[m], P[n])
        ddphiyy[a] = np.outer(P[m], ddP[n])
        tr["phi_xm"][a] = Pe[m, 0] * P[n]     # trace at xhat = -1, vs yhat
        tr["phi_xp"][a] = Pe[m, 1] * P[n]     # trace at xhat = +1
        tr["phi_ym"][a] = P[m] * Pe[n, 0]     # trace at yhat = -1, vs xhat
        tr["phi_yp"][a] = P[m] * Pe[n, 1]
        tr["dphix_xm"][a] = dPe[m, 0] * P[n]  # d/dxhat at xhat = -1
        tr["dphix_xp"][a] = dPe[m, 1] * P[n]
        tr["dphiy_ym"][a] = P[m] * dPe[n, 0]
        tr["dphiy_yp"][a] = P[m] * dPe[n, 1]
    out = {
        "x": x, "w": rule.weights, "pairs": pairs,
        "phi": phi, "dphix": dphix, "dphiy": dphiy,
        "ddphixx": ddphixx, "ddphiyy": ddphiyy,
    }
    out.update(tr)
    return out


@dataclass(frozen=True)
class DGField:
    """Piecewise-polynomial DG solution with solution bounds attached."""

    grid: Grid1D | Grid2D
    basis: Basis
    coeffs: np.ndarray
    u_min: float = -np.inf
    u_max: float = np.inf

    def __post_init__(self):
        expect = ((self.grid.n, self.basis.n_modes) if self.basis.dim == 1
                  else (self.grid.nx, self.grid.ny, self.basis.n_modes))
        if self.coeffs.shape != expect:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {expect}")

    @property
    def dim(self) -> int:
        return self.basis.dim

    def cell_averages(self) -> np.ndarray:
        return self.coeffs[..., 0]

    def with_coeffs(self, coeffs: np.ndarray) -> "DGField":
        return DGField(grid=self.grid, basis=self.basis, coeffs=coeffs,
                       u_min=self.u_min, u_max=self.u_max)

    def eval_at_offsets(self, xhat, yhat=None) -> np.ndarray:
        """Evaluate on every cell at reference offsets.

        1D: returns (n, len(xhat)). 2D: (nx, ny, len(xhat), len(yhat)) on the
        tensor grid of offsets.
        """
        if self.dim == 1:
            P, _ = legendre_eval(self.basis.k, np.asarray(xhat, dtype=float))
            return np.einsum("jm,mq->jq", self.coeffs, P)
        xhat = np.asarray(xhat, dtype=float)
        yhat = np.asarray(yhat, dtype=float)
        Px, _ = legendre_eval(self.basis.k, xhat)
        Py, _ = legendre_eval(self.basis.k, yhat)
        pairs = self.basis.mode_pairs
        phi = np.stack([np.multiply.outer(Px[m], Py[n]) for m, n in pairs])
        return np.einsum("ijm,mqr->ijqr", self.coeffs, phi)


def project_1d(u0, grid: Grid1D, basis: Basis, n_quad: int | None = None,
               u_min: float = -np.inf, u_max: float = np.inf,
               cell_average=None) -> DGField:
    """Quadrature L2 projection of u0 onto the broken polynomial space.

    ``cell_average(xlo, xhi)``, when given, overwrites mode 0 with exact cell
    averages; used for discontinuous data where Gauss sampling of a jump
    would misplace the average.
    """
    nq = n_quad if n_quad is not None else basis.k + 1
    t = tables_1d(basis.k, nq)
    centers = grid.centers()
    xq = centers[:, None] + 0.5 * grid.h * t["x"][None, :]
    uq = np.asarray(u0(xq), dtype=float)
    if uq.shape != xq.shape:
        uq = np.broadcast_to(uq, xq.shape).astype(float)
    scale = (2 * np.arange(basis.k + 1) + 1) / 2.0
    coeffs = np.einsum("jq,mq,q->jm", uq, t["P"], t["w"]) * scale[None, :]
    if cell_average is not None:
        lo = grid.a + np.arange(grid.n) * grid.h
        coeffs[:, 0] = [cell_average(x, x + grid.h) for x in lo]
    return DGField(grid=grid, basis=basis, coeffs=coeffs, u_min=u_min, u_max=u_max)


def project_2d(u0, grid: Grid2D, basis: Basis, n_quad: int | None = None,
               u_min: float = -np.inf, u_max: float = np.inf,
               cell_average=None) -> DGField:
    """2D analogue of :func:`project_1d`; u0 takes meshgrid-style arrays."""
    nq = n_quad if n_quad is not None else basis.k + 1
    t = tables_2d(basis.k, nq)
    cx = grid.x.centers()
    cy = grid.y.centers()
    X = cx[:, None, None, None] + 0.5 * grid.hx * t["x"][None, None, :, None]
    Y = cy[None, :, None, None] + 0.5 * grid.hy * t["x"][None, None, None, :]
    X, Y = np.broadcast_arrays(X, Y)
    uq = np.asarray(u0(X, Y), dtype=float)
    pairs = np.array(t["pairs"])
    scale = ((2 * pairs[:, 0] + 1) / 2.0) * ((2 * pairs[:, 1] + 1) / 2.0)
    ww = np.multiply.outer(t["w"], t["w"])
    coeffs = np.einsum("ijqr,mqr,qr->ijm", uq, t["phi"], ww) * scale[None, None, :]
    if cell_average is not None:
        xlo = grid.x.a + np.arange(grid.nx) * grid.hx
        ylo = grid.y.a + np.arange(grid.ny) * grid.hy
        for i, x0 in enumerate(xlo):
            for j, y0 in enumerate(ylo):
                coeffs[i, j, 0] = cell_average(x0, x0 + grid.hx, y0, y0 + grid.hy)
    return DGField(grid=grid, basis=basis, coeffs=coeffs, u_min=u_min, u_max=u_max)


def l2_norm(field: DGField) -> float:
    """Broken L2 norm, exact from modal orthogonality."""
    norms = field.basis.norms()
    if field.dim == 1:
        cellvol = field.grid.h / 2.0
        return float(np.sqrt(cellvol * np.sum(field.coeffs**2 * norms)))
    cellvol = field.grid.hx * field.grid.hy / 4.0
    return float(np.sqrt(cellvol * np.sum(field.coeffs**2 * norms)))


def total_mass(field: DGField) -> float:
    if field.dim == 1:
        return float(np.sum(field.cell_averages()) * field.grid.h)
    return float(np.sum(field.cell_averages()) * field.grid.hx * field.grid.hy)
