"""Vorticity-stream coupling: periodic spectral Poisson solve and the
divergence-free velocities it feeds to the 2D transport operator.

The stream function is solved in Fourier space from the vorticity grid;
velocities enter the DG operator as the curl of a per-cell polynomial
interpolant of psi sampled on shared Lobatto nodes, so edge normal
velocities are single-valued and their cell-boundary integrals telescope
exactly (constants stay steady, and the first-order scheme keeps its
bound-preserving headroom).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolvabilityError
from .field import DGField
from .mesh import Basis, Grid2D
from .operators import VelocityData, build_velocity_data, lobatto_nodes

MEAN_TOL = 1e-10


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a periodic scalar on the cell-center grid."""

    coeffs: np.ndarray      # complex (nx, ny), forward FFT convention
    lx: float
    ly: float
    x0: float = 0.0         # coordinate of the first sample (cell center)
    y0: float = 0.0
    mean_removed: float = 0.0

    @property
    def nx(self) -> int:
        return self.coeffs.shape[0]

    @property
    def ny(self) -> int:
        return self.coeffs.shape[1]

    def wavenumbers(self):
        kx = 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.lx / self.nx)
        ky = 2.0 * np.pi * np.fft.fftfreq(self.ny, d=self.ly / self.ny)
        return kx, ky


def solve_stream_function(omega_grid: np.ndarray, grid: Grid2D,
                          mean_tol: float = MEAN_TOL) -> SpectralField:
    """Solve Laplacian(psi) = omega on the periodic cell grid.

    ``omega_grid`` is read as point samples on the uniform cell-center
    lattice. The zero mode of psi is fixed to zero; a right-hand-side mean
    beyond ``mean_tol`` (relative to the field scale) is a solvability
    error, a smaller one is subtracted and recorded.
    """
    if not (grid.x.boundary.is_periodic and grid.y.boundary.is_periodic):
        raise SolvabilityError("spectral Poisson solve needs a periodic domain")
    omega_grid = np.asarray(omega_grid, dtype=float)
    scale = max(float(np.abs(omega_grid).max()), 1.0)
    mean = float(omega_grid.mean())
    if abs(mean) > mean_tol * scale:
        raise SolvabilityError(
            f"omega has mean {mean:.3e}; periodic Poisson problem unsolvable")
    lx = grid.x.b - grid.x.a
    ly = grid.y.b - grid.y.a
    what = np.fft.fft2(omega_grid - mean)
    kx = 2.0 * np.pi * np.fft.fftfreq(grid.nx, d=lx / grid.nx)
    ky = 2.0 * np.pi * np.fft.fftfreq(grid.ny, d=ly / grid.ny)
    k2 = kx[:, None] ** 2 + ky[None, :] ** 2
    k2[0, 0] = 1.0
    psi_hat = -what / k2
    psi_hat[0, 0] = 0.0
    return SpectralField(coeffs=psi_hat, lx=lx, ly=ly,
                         x0=grid.x.a + 0.5 * grid.hx, y0=grid.y.a + 0.5 * grid.hy,
                         mean_removed=mean)


def eval_spectral(field: SpectralField, coeffs: np.ndarray, x, y) -> np.ndarray:
    """Evaluate a Fourier series at arbitrary points (direct summation)."""
    kx, ky = field.wavenumbers()
    x = np.asarray(x, dtype=float) - field.x0
    y = np.asarray(y, dtype=float) - field.y0
    phase_x = np.exp(1j * np.multiply.outer(x, kx))        # (..., nx)
    phase_y = np.exp(1j * np.multiply.outer(y, ky))        # (..., ny)
    partial = np.einsum("...m,mn->...n", phase_x, coeffs)
    vals = np.einsum("...n,...n->...", partial, phase_y)
    return np.real(vals) / (field.nx * field.ny)


def velocity_at(psi: SpectralField, points) -> np.ndarray:
    """(u, v) = (-psi_y, psi_x) at given (x, y) points, spectrally exact."""
    pts = np.asarray(points, dtype=float)
    kx, ky = psi.wavenumbers()
    u_hat = -1j * ky[None, :] * psi.coeffs
    v_hat = 1j * kx[:, None] * psi.coeffs
    u = eval_spectral(psi, u_hat, pts[..., 0], pts[..., 1])
    v = eval_spectral(psi, v_hat, pts[..., 0], pts[..., 1])
    return np.stack([u, v], axis=-1)


def laplacian_on_grid(psi: SpectralField) -> np.ndarray:
    """Spectral Laplacian sampled back on the cell-center grid."""
    kx, ky = psi.wavenumbers()
    k2 = kx[:, None] ** 2 + ky[None, :] ** 2
    return np.real(np.fft.ifft2(-k2 * psi.coeffs))


def stream_nodes_spectral(psi: SpectralField, grid: Grid2D, basis: Basis) -> np.ndarray:
    """psi sampled on the global Lobatto node grid via phase-shifted FFTs.

    Node lattices are uniform shifts of the cell-center grid, so each
    (x-offset, y-offset) pair is one inverse FFT. The wrap row/column is
    copied from the first so periodic interfaces share bitwise values.
    """
    k = basis.k
    lob = lobatto_nodes(k + 2)
    nx, ny = grid.nx, grid.ny
    kx, ky = psi.wavenumbers()

    # node offsets relative to the cell center; node k+1 wraps to the next cell
    dx = 0.5 * grid.hx * lob[:-1]
    dy = 0.5 * grid.hy * lob[:-1]
    phase_x = [np.exp(1j * kx * d)[:, None] for d in dx]
    phase_y = [np.exp(1j * ky * d)[None, :] for d in dy]

    stride = k + 1
    out = np.empty((nx * stride + 1, ny * stride + 1))
    for s in range(stride):
        for t in range(stride):
            vals = np.real(np.fft.ifft2(psi.coeffs * phase_x[s] * phase_y[t]))
            out[s:nx * stride:stride, t:ny * stride:stride] = vals
    out[-1, :-1] = out[0, :-1]
    out[:, -1] = out[:, 0]
    return out


def omega_point_spectrum(field: DGField) -> SpectralField:
    """Fourier coefficients of the point interpolant matching cell averages.

    Dividing by the per-axis averaging factors recovers the band-limited
    function whose cell averages equal the given mode-0 data; skipping this
    deconvolution would bias velocities at second order.
    """
    grid: Grid2D = field.grid
    avgs = field.cell_averages()
    lx = grid.x.b - grid.x.a
    ly = grid.y.b - grid.y.a
    mean = float(avgs.mean())
    what = np.fft.fft2(avgs - mean)
    kx = 2.0 * np.pi * np.fft.fftfreq(grid.nx, d=lx / grid.nx)
    ky = 2.0 * np.pi * np.fft.fftfreq(grid.ny, d=ly / grid.ny)
    sx = np.sinc(kx * grid.hx / (2.0 * np.pi))
    sy = np.sinc(ky * grid.hy / (2.0 * np.pi))
    what = what / (sx[:, None] * sy[None, :])
    k2 = kx[:, None] ** 2 + ky[None, :] ** 2
    k2[0, 0] = 1.0
    psi_hat = -what / k2
    psi_hat[0, 0] = 0.0
    return SpectralField(coeffs=psi_hat, lx=lx, ly=ly,
                         x0=grid.x.a + 0.5 * grid.hx, y0=grid.y.a + 0.5 * grid.hy,
                         mean_removed=mean)


def spectral_velocity_data(field: DGField, problem) -> VelocityData:
    """Velocity samples for the transport operator from the current field.

    The vorticity mean is projected out before the solve (a constant
    background induces no periodic velocity); its magnitude is recorded on
    the spectral field.
    """
    grid: Grid2D = field.grid
    psi = omega_point_spectrum(field)
    nodes = stream_nodes_spectral(psi, grid, field.basis)
    return build_velocity_data(nodes, grid, field.basis)


def ns_rhs(field: DGField, problem, config, t: float = 0.0):
    """Semi-discrete RHS of the vorticity transport with self-induced velocity."""
    from .operators import semidiscrete_rhs_2d

    velocity = spectral_velocity_data(field, problem)
    return semidiscrete_rhs_2d(field, problem, config, t=t, velocity=velocity)
