"""Semi-discrete DG spatial operators for scalar convection-diffusion.

The weak form integrates the diffusion term by parts twice, so both the
solution gradient trace and the penalty jump appear in the interface
fluxes. The cell-average flux H (convective minus diffusive) is returned
alongside the modal time derivative: the mode-0 derivative is assembled
from that record, never re-derived, so the flux-difference identity holds
bitwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalFailureError
from .field import DGField, tables_1d, tables_2d
from .mesh import (
    DIRICHLET,
    Basis,
    BoundaryCondition,
    Grid1D,
    Grid2D,
    gauss_rule,
    legendre_eval,
)

STANDARD = "standard"
PRINTED = "printed"


@dataclass(frozen=True)
class DiffusiveFluxConfig:
    """Penalty constant and parenthesization variant of the gradient flux.

    ``alpha=None`` resolves to the per-degree defaults (1 for P1, 10 for
    P2/P3). The two forms differ in whether the jump penalty is multiplied
    by the chord slope [a]/[u]; ``standard`` keeps the penalty outside.
    """

    alpha: float | None = None
    form: str = STANDARD
    tau: float = 1e-12

    def __post_init__(self):
        if self.form not in (STANDARD, PRINTED):
            raise ValueError(f"unknown diffusive flux form {self.form!r}")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("penalty constant must be positive")
        if self.tau <= 0:
            raise ValueError("jump tolerance must be positive")

    def resolve_alpha(self, k: int) -> float:
        if self.alpha is not None:
            return self.alpha
        return 1.0 if k <= 1 else 10.0


@dataclass(frozen=True)
class FluxRecord1D:
    """Cell-average interface fluxes, one per interface (N+1 values)."""

    values: np.ndarray


@dataclass(frozen=True)
class FluxRecord2D:
    """Edge-integrated average fluxes: x on vertical, y on horizontal edges."""

    x: np.ndarray  # (nx+1, ny)
    y: np.ndarray  # (nx, ny+1)


def convective_flux(u_minus, u_plus, f, alpha_glf: float):
    """Global Lax-Friedrichs two-point flux; consistent and monotone."""
    return 0.5 * (f(u_minus) + f(u_plus)) - 0.5 * alpha_glf * (u_plus - u_minus)


def diffusive_fluxes_1d(u_minus, u_plus, ux_minus, a, a_prime,
                        alpha: float, h: float, form: str = STANDARD,
                        tau: float = 1e-12):
    """Gradient-trace flux and the companion value flux a(u+).

    The chord slope [a]/[u] falls back to a'((u- + u+)/2) when the jump is
    below tau; a centered difference of a with step 1e-6 stands in when no
    derivative is supplied.
    """
    u_minus = np.asarray(u_minus, dtype=float)
    u_plus = np.asarray(u_plus, dtype=float)
    jump_u = u_plus - u_minus
    jump_a = a(u_plus) - a(u_minus)
    mid = 0.5 * (u_minus + u_plus)
    if a_prime is not None:
        slope_mid = a_prime(mid)
    else:
        slope_mid = (a(mid + 1e-6) - a(mid - 1e-6)) / 2e-6
    small = np.abs(jump_u) < tau
    safe = np.where(small, 1.0, jump_u)
    r = np.where(small, slope_mid, jump_a / safe)
    if form == STANDARD:
        tilde = r * ux_minus + (alpha / h) * jump_a
    else:
        tilde = r * (ux_minus + (alpha / h) * jump_a)
    return tilde, a(u_plus)


def _ghost_row(bc: BoundaryCondition, side: str, n_modes: int) -> np.ndarray:
    row = np.zeros(n_modes)
    if bc.kind == DIRICHLET:
        row[0] = bc.left_value if side == "left" else bc.right_value
    return row


def pad_coeffs_1d(coeffs: np.ndarray, bc: BoundaryCondition) -> np.ndarray:
    n, nm = coeffs.shape
    out = np.empty((n + 2, nm))
    out[1:-1] = coeffs
    if bc.is_periodic:
        out[0] = coeffs[-1]
        out[-1] = coeffs[0]
    else:
        out[0] = _ghost_row(bc, "left", nm)
        out[-1] = _ghost_row(bc, "right", nm)
    return out


def pad_values_1d(values: np.ndarray, bc: BoundaryCondition, axis: int = 0) -> np.ndarray:
    """Pad a cell-average array with one ghost value per side along axis."""
    if axis != 0:
        values = np.moveaxis(values, axis, 0)
    out = np.empty((values.shape[0] + 2,) + values.shape[1:])
    out[1:-1] = values
    if bc.is_periodic:
        out[0] = values[-1]
        out[-1] = values[0]
    else:
        out[0] = bc.left_value if bc.kind == DIRICHLET else 0.0
        out[-1] = bc.right_value if bc.kind == DIRICHLET else 0.0
    if axis != 0:
        out = np.moveaxis(out, 0, axis)
    return out


def _check_finite(arr: np.ndarray, what: str):
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(np.atleast_1d(arr)))[0]
        raise NumericalFailureError(f"non-finite {what} at index {tuple(bad)}")


def semidiscrete_rhs_1d(field: DGField, problem, config: DiffusiveFluxConfig,
                        t: float = 0.0):
    """Assemble du/dt coefficients and the interface flux record.

    Volume terms use k+1 Gauss points (inexact for nonlinear f, a; standard
    practice). The mode-0 row is written from the flux record so that it is
    the same floating-point expression as the record difference.
    """
    grid: Grid1D = field.grid
    basis = field.basis
    k, h, n = basis.k, grid.h, grid.n
    tb = tables_1d(k, k + 1)
    alpha = config.resolve_alpha(k)

    padded = pad_coeffs_1d(field.coeffs, grid.boundary)
    traces = padded @ np.stack(
        [tb["P_right"], tb["P_left"], tb["dP_right"]], axis=1)
    um = traces[:-1, 0]
    up = traces[1:, 1]
    uxm = traces[:-1, 2] * (2.0 / h)

    has_f = problem.f is not None
    has_a = problem.a is not None
    fhat = (convective_flux(um, up, problem.f, problem.max_fp)
            if has_f else np.zeros(n + 1))
    if has_a:
        tilde, ahat = diffusive_fluxes_1d(
            um, up, uxm, problem.a, problem.a_prime, alpha, h,
            form=config.form, tau=config.tau)
    else:
        tilde = np.zeros(n + 1)
        ahat = np.zeros(n + 1)
    flux = fhat - tilde
    _check_finite(flux, "interface flux")

    uq = padded[1:-1] @ tb["P"]
    dc = np.zeros((n, k + 1))
    if has_f:
        dc += problem.f(uq) @ (tb["dP"] * tb["w"]).T
    if has_a:
        dc += (2.0 / h) * (problem.a(uq) @ (tb["ddP"] * tb["w"]).T)
    dc -= fhat[1:, None] * tb["P_right"] - fhat[:-1, None] * tb["P_left"]
    dc += tilde[1:, None] * tb["P_right"] - tilde[:-1, None] * tb["P_left"]
    if has_a:
        dc -= (2.0 / h) * (ahat[1:, None] * tb["dP_right"]
                           - ahat[:-1, None] * tb["dP_left"])
    dc *= (2 * np.arange(k + 1) + 1) / h
    dc[:, 0] = -(flux[1:] - flux[:-1]) / h
    return dc, FluxRecord1D(values=flux)


def first_order_fluxes_1d(ubar: np.ndarray, problem, grid: Grid1D) -> np.ndarray:
    """Monotone first-order interface fluxes on cell averages.

    Global Lax-Friedrichs for the convective part plus a centered
    difference of a(u) for the diffusive part; MPP under the CFL sizes
    used here (checked at runtime through the limiter's Gamma guard).
    """
    padded = pad_values_1d(ubar, grid.boundary)
    ul, ur = padded[:-1], padded[1:]
    flux = np.zeros(grid.n + 1)
    if problem.f is not None:
        flux += 0.5 * (problem.f(ul) + problem.f(ur)) - 0.5 * problem.max_fp * (ur - ul)
    if problem.a is not None:
        flux -= (problem.a(ur) - problem.a(ul)) / grid.h
    return flux


# ---------------------------------------------------------------------------
# prescribed / reconstructed velocity fields for the 2D transport form
# ---------------------------------------------------------------------------

def lobatto_nodes(n: int) -> np.ndarray:
    """Gauss-Lobatto nodes on [-1, 1] (endpoints included)."""
    if n < 2:
        raise ValueError("Lobatto rules need at least 2 nodes")
    if n == 2:
        return np.array([-1.0, 1.0])
    coeff = np.zeros(n)
    coeff[n - 1] = 1.0
    interior = np.polynomial.legendre.legroots(np.polynomial.legendre.legder(coeff))
    return np.concatenate(([-1.0], np.sort(interior), [1.0]))


@lru_cache(maxsize=None)
def _stream_tables(k: int):
    """Node-value -> (value, d/dxhat) maps at Gauss points, per direction.

    The stream function is interpolated on k+2 Lobatto nodes per direction;
    taking the curl of that polynomial yields an exactly divergence-free
    velocity whose edge integrals telescope, which is what keeps constant
    states steady and the first-order scheme bound-preserving.
    """
    nn = k + 2
    lob = lobatto_nodes(nn)
    pl, _ = legendre_eval(nn - 1, lob)
    vinv = np.linalg.inv(pl.T)
    gauss = gauss_rule(k + 1).nodes
    pg, dpg = legendre_eval(nn - 1, gauss)
    return {"lob": lob, "interp": pg.T @ vinv, "deriv": dpg.T @ vinv}


def stream_node_coords(grid1d: Grid1D, k: int) -> np.ndarray:
    """Global Lobatto node coordinates along one axis (N*(k+1)+1 points)."""
    lob = lobatto_nodes(k + 2)
    body = (grid1d.centers()[:, None] + 0.5 * grid1d.h * lob[None, :-1]).ravel()
    return np.append(body, grid1d.b)


@dataclass(frozen=True)
class VelocityData:
    """Divergence-free velocity sampled where the 2D operator needs it.

    Edge means come from stream-function corner differences, so the
    discrete divergence of the first-order fluxes vanishes identically.
    """

    v1_vol: np.ndarray       # (nx, ny, nq, nq)
    v2_vol: np.ndarray
    v1_vedge: np.ndarray     # (nx+1, ny, nq)
    v2_hedge: np.ndarray     # (nx, ny+1, nq)
    v1_vedge_mean: np.ndarray   # (nx+1, ny)
    v2_hedge_mean: np.ndarray   # (nx, ny+1)
    alpha_vedge: np.ndarray
    alpha_hedge: np.ndarray
    max_v1: float
    max_v2: float


def build_velocity_data(psi_nodes: np.ndarray, grid: Grid2D, basis: Basis) -> VelocityData:
    """Velocity samples from stream-function values on the global node grid.

    ``psi_nodes`` has shape (nx*(k+1)+1, ny*(k+1)+1); for periodic grids the
    last row/column must be a copy of the first so shared interfaces carry
    bitwise-identical values.
    """
    k = basis.k
    nn = k + 2
    nx, ny = grid.nx, grid.ny
    hx, hy = grid.hx, grid.hy
    st = _stream_tables(k)
    interp, deriv = st["interp"], st["deriv"]

    idx_x = np.arange(nx)[:, None] * (k + 1) + np.arange(nn)[None, :]
    idx_y = np.arange(ny)[:, None] * (k + 1) + np.arange(nn)[None, :]
    psi_cell = psi_nodes[idx_x[:, None, :, None], idx_y[None, :, None, :]]

    v1_vol = -(2.0 / hy) * np.einsum("ijst,qs,rt->ijqr", psi_cell, interp, deriv)
    v2_vol = (2.0 / hx) * np.einsum("ijst,qs,rt->ijqr", psi_cell, deriv, interp)

    iface_x = np.arange(nx + 1) * (k + 1)
    psi_vedge = psi_nodes[iface_x[:, None, None], idx_y[None, :, :]]
    v1_vedge = -(2.0 / hy) * np.einsum("ijt,rt->ijr", psi_vedge, deriv)
    v1_vedge_mean = (psi_vedge[:, :, 0] - psi_vedge[:, :, -1]) / hy
    alpha_vedge = np.maximum(np.abs(v1_vedge).max(axis=2), np.abs(v1_vedge_mean))

    iface_y = np.arange(ny + 1) * (k + 1)
    psi_hedge = psi_nodes[idx_x[:, None, :], iface_y[None, :, None]]
    v2_hedge = (2.0 / hx) * np.einsum("ijs,qs->ijq", psi_hedge, deriv)
    v2_hedge_mean = (psi_hedge[:, :, -1] - psi_hedge[:, :, 0]) / hx
    alpha_hedge = np.maximum(np.abs(v2_hedge).max(axis=2), np.abs(v2_hedge_mean))

    return VelocityData(
        v1_vol=v1_vol, v2_vol=v2_vol,
        v1_vedge=v1_vedge, v2_hedge=v2_hedge,
        v1_vedge_mean=v1_vedge_mean, v2_hedge_mean=v2_hedge_mean,
        alpha_vedge=alpha_vedge, alpha_hedge=alpha_hedge,
        max_v1=float(max(np.abs(v1_vol).max(), np.abs(v1_vedge).max())),
        max_v2=float(max(np.abs(v2_vol).max(), np.abs(v2_hedge).max())),
    )


def analytic_velocity_data(problem, grid: Grid2D, basis: Basis, t: float) -> VelocityData:
    """Velocity data for problems carrying a closed-form stream function."""
    gx = stream_node_coords(grid.x, basis.k)
    gy = stream_node_coords(grid.y, basis.k)
    psi = np.asarray(problem.psi(t, gx[:, None], gy[None, :]), dtype=float)
    psi = np.broadcast_to(psi, (gx.size, gy.size)).copy()
    if grid.x.boundary.is_periodic:
        psi[-1, :] = psi[0, :]
    if grid.y.boundary.is_periodic:
        psi[:, -1] = psi[:, 0]
    return build_velocity_data(psi, grid, basis)


# ---------------------------------------------------------------------------
# 2D operator
# ---------------------------------------------------------------------------

def pad_coeffs_2d(coeffs: np.ndarray, bcx: BoundaryCondition,
                  bcy: BoundaryCondition) -> np.ndarray:
    nx, ny, nm = coeffs.shape
    out = np.zeros((nx + 2, ny + 2, nm))
    out[1:-1, 1:-1] = coeffs
    if bcx.is_periodic:
        out[0, 1:-1] = coeffs[-1]
        out[-1, 1:-1] = coeffs[0]
    elif bcx.kind == DIRICHLET:
        raise ValueError("dirichlet boundaries are not supported in 2D")
    if bcy.is_periodic:
        out[1:-1, 0] = coeffs[:, -1]
        out[1:-1, -1] = coeffs[:, 0]
    elif bcy.kind == DIRICHLET:
        raise ValueError("dirichlet boundaries are not supported in 2D")
    return out


def _point_convective_2d(um, up, problem, velocity, axis: int):
    """Pointwise monotone flux at edge quadrature points, oriented +x or +y."""
    if velocity is not None:
        v = velocity.v1_vedge if axis == 0 else velocity.v2_hedge
        return 0.5 * v * (um + up) - 0.5 * np.abs(v) * (up - um)
    flux_fn = problem.f if axis == 0 else problem.g
    if flux_fn is None:
        return np.zeros_like(um)
    speed = problem.max_fp if axis == 0 else problem.max_gp
    return convective_flux(um, up, flux_fn, speed)


def semidiscrete_rhs_2d(field: DGField, problem, config: DiffusiveFluxConfig,
                        t: float = 0.0, velocity: VelocityData | None = None):
    """2D analogue of the 1D assembly on the total-degree P^k space.

    Diffusion is isotropic, A = a'(u) I, which covers every registered
    problem; the edge flux applies the gradient trace from the minus side
    plus the eigenvalue-scaled jump penalty.
    """
    grid: Grid2D = field.grid
    basis = field.basis
    k = basis.k
    nq = k + 1
    nx, ny, hx, hy = grid.nx, grid.ny, grid.hx, grid.hy
    tb = tables_2d(k, nq)
    w = tb["w"]
    ww = np.multiply.outer(w, w)
    alpha = config.resolve_alpha(k)

    if problem.velocity_mode is not None and velocity is None:
        if problem.velocity_mode != "analytic":
            raise ValueError("spectral velocity problems need velocity data")
        velocity = analytic_velocity_data(problem, grid, basis, t)

    has_a = problem.a is not None
    lam_diff = problem.max_ap if has_a else 0.0

    padded = pad_coeffs_2d(field.coeffs, grid.x.boundary, grid.y.boundary)
    cx = padded[:, 1:-1]   # x-padded, y interior: (nx+2, ny, nm)
    cy = padded[1:-1, :]   # (nx, ny+2, nm)

    # vertical edges (x-normal), interfaces i = 0..nx
    u_xp = np.tensordot(cx, tb["phi_xp"], axes=([2], [0]))
    u_xm = np.tensordot(cx, tb["phi_xm"], axes=([2], [0]))
    um_v = u_xp[:-1]
    up_v = u_xm[1:]
    fpt_v = _point_convective_2d(um_v, up_v, problem, velocity, axis=0)
    if has_a:
        ux_minus = np.tensordot(cx[:-1], tb["dphix_xp"], axes=([2], [0])) * (2.0 / hx)
        dpt_v = problem.a_prime(um_v) * ux_minus + (alpha * lam_diff / hx) * (up_v - um_v)
        ua_v = up_v * problem.a_prime(up_v)
    else:
        dpt_v = 0.0
        ua_v = None
    hpt = fpt_v - dpt_v

    # horizontal edges (y-normal), interfaces j = 0..ny
    u_yp = np.tensordot(cy, tb["phi_yp"], axes=([2], [0]))
    u_ym = np.tensordot(cy, tb["phi_ym"], axes=([2], [0]))
    um_h = u_yp[:, :-1]
    up_h = u_ym[:, 1:]
    fpt_h = _point_convective_2d(um_h, up_h, problem, velocity, axis=1)
    if has_a:
        uy_minus = np.tensordot(cy[:, :-1], tb["dphiy_yp"], axes=([2], [0])) * (2.0 / hy)
        dpt_h = problem.a_prime(um_h) * uy_minus + (alpha * lam_diff / hy) * (up_h - um_h)
        ua_h = up_h * problem.a_prime(up_h)
    else:
        dpt_h = 0.0
        ua_h = None
    gpt = fpt_h - dpt_h

    hrec = 0.5 * (hpt @ w)
    grec = 0.5 * (gpt @ w)
    _check_finite(hrec, "x-edge flux")
    _check_finite(grec, "y-edge flux")

    # volume terms; contractions run as tensordots against weighted tables
    def back(values, table):
        return np.tensordot(values, table * ww, axes=([2, 3], [1, 2]))

    uq = np.tensordot(field.coeffs, tb["phi"], axes=([2], [0]))
    if velocity is not None:
        fq = velocity.v1_vol * uq
        gq = velocity.v2_vol * uq
    else:
        fq = problem.f(uq) if problem.f is not None else None
        gq = problem.g(uq) if problem.g is not None else None
    rhs = np.zeros_like(field.coeffs)
    if fq is not None:
        rhs += (hy / 2.0) * back(fq, tb["dphix"])
    if gq is not None:
        rhs += (hx / 2.0) * back(gq, tb["dphiy"])
    if has_a:
        mu_q = problem.a_prime(uq)
        lap_phi = (4.0 / hx**2) * tb["ddphixx"] + (4.0 / hy**2) * tb["ddphiyy"]
        jac = hx * hy / 4.0
        rhs += jac * back(uq * mu_q, lap_phi)
        if problem.a_second is not None:
            dudx = np.tensordot(field.coeffs, tb["dphix"], axes=([2], [0])) * (2.0 / hx)
            dudy = np.tensordot(field.coeffs, tb["dphiy"], axes=([2], [0])) * (2.0 / hy)
            mu_p = problem.a_second(uq)
            rhs += jac * (2.0 / hx) * back(uq * mu_p * dudx, tb["dphix"])
            rhs += jac * (2.0 / hy) * back(uq * mu_p * dudy, tb["dphiy"])

    # edge terms; signs follow the outward normal of each cell
    def edge_x(i_slice, phi_tr, dphi_tr):
        term = np.tensordot(hpt[i_slice], phi_tr * w, axes=([2], [1]))
        if ua_v is not None:
            term += (2.0 / hx) * np.tensordot(ua_v[i_slice], dphi_tr * w, axes=([2], [1]))
        return (hy / 2.0) * term

    def edge_y(j_slice, phi_tr, dphi_tr):
        term = np.tensordot(gpt[:, j_slice], phi_tr * w, axes=([2], [1]))
        if ua_h is not None:
            term += (2.0 / hy) * np.tensordot(ua_h[:, j_slice], dphi_tr * w, axes=([2], [1]))
        return (hx / 2.0) * term

    rhs -= edge_x(np.s_[1:], tb["phi_xp"], tb["dphix_xp"])
    rhs += edge_x(np.s_[:-1], tb["phi_xm"], tb["dphix_xm"])
    rhs -= edge_y(np.s_[1:], tb["phi_yp"], tb["dphiy_yp"])
    rhs += edge_y(np.s_[:-1], tb["phi_ym"], tb["dphiy_ym"])

    pairs = np.array(tb["pairs"])
    mass = hx * hy / ((2 * pairs[:, 0] + 1.0) * (2 * pairs[:, 1] + 1.0))
    rhs /= mass[None, None, :]
    rhs[:, :, 0] = (-(hrec[1:] - hrec[:-1]) / hx
                    - (grec[:, 1:] - grec[:, :-1]) / hy)
    return rhs, FluxRecord2D(x=hrec, y=grec)


def first_order_fluxes_2d(ubar: np.ndarray, problem, grid: Grid2D,
                          velocity: VelocityData | None = None):
    """First-order monotone edge fluxes on the cell-average grid."""
    padded = pad_values_1d(ubar, grid.x.boundary, axis=0)
    padded = pad_values_1d(padded, grid.y.boundary, axis=1)
    ulx, urx = padded[:-1, 1:-1], padded[1:, 1:-1]
    uly, ury = padded[1:-1, :-1], padded[1:-1, 1:]
    if velocity is not None:
        fx = (0.5 * velocity.v1_vedge_mean * (ulx + urx)
              - 0.5 * velocity.alpha_vedge * (urx - ulx))
        fy = (0.5 * velocity.v2_hedge_mean * (uly + ury)
              - 0.5 * velocity.alpha_hedge * (ury - uly))
    else:
        fx = np.zeros_like(ulx)
        fy = np.zeros_like(uly)
        if problem.f is not None:
            fx += 0.5 * (problem.f(ulx) + problem.f(urx)) - 0.5 * problem.max_fp * (urx - ulx)
        if problem.g is not None:
            fy += 0.5 * (problem.g(uly) + problem.g(ury)) - 0.5 * problem.max_gp * (ury - uly)
    if problem.a is not None:
        fx -= (problem.a(urx) - problem.a(ulx)) / grid.hx
        fy -= (problem.a(ury) - problem.a(uly)) / grid.hy
    return fx, fy
