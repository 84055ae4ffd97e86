"""SSP-RK3 stepping with stage-flux accumulation and final-stage limiting.

Stages follow the classic three-stage scheme:

    u1   = u + dt * L(u)
    u2   = u + dt * (L(u) + L(u1)) / 4
    next = u + dt * (L(u)/6 + 2*L(u2)/3 + L(u1)/6)

The cell-average fluxes of the three stages combine with the same 1/6,
1/6, 2/3 weights; the MPP limiter acts once per step on that combined
flux and replaces only the mode-0 update, leaving higher moments alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import MppdgError, NumericalFailureError
from .field import DGField
from .limiters import (
    BoundPair,
    LimiterReport,
    apply_mpp_limiter_1d,
    apply_mpp_limiter_2d,
    tvb_limiter,
)
from .operators import (
    DiffusiveFluxConfig,
    VelocityData,
    analytic_velocity_data,
    first_order_fluxes_1d,
    first_order_fluxes_2d,
    semidiscrete_rhs_1d,
    semidiscrete_rhs_2d,
)

RK_STAGE_WEIGHTS = (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0)  # on L(u), L(u1), L(u2)

_CFLC_DEFAULTS = {1: 0.3, 2: 0.18, 3: 0.1}
_CFLD_DEFAULTS = {1: 0.06, 2: 0.01, 3: 0.005}


@dataclass(frozen=True)
class CflConfig:
    """CFL numbers for the convective and diffusive step-size bounds.

    ``p3_time_scaling`` switches the convective bound to h^(4/3) for k=3,
    which is what recovers full fourth-order accuracy in time-accuracy
    sweeps.
    """

    cflc: float | None = None
    cfld: float | None = None
    p3_time_scaling: bool = True

    def resolve(self, k: int) -> tuple[float, float]:
        cflc = self.cflc if self.cflc is not None else _CFLC_DEFAULTS.get(k, 0.1)
        cfld = self.cfld if self.cfld is not None else _CFLD_DEFAULTS.get(k, 0.005)
        if cflc <= 0 or cfld <= 0:
            raise ValueError("CFL numbers must be positive")
        return cflc, cfld


@dataclass
class StepControls:
    """Limiter switches for a run."""

    mpp: bool = True
    tvb_m: float | None = None
    flux: DiffusiveFluxConfig = dc_field(default_factory=DiffusiveFluxConfig)


def compute_dt(field: DGField, problem, cfl: CflConfig,
               velocity: VelocityData | None = None) -> float:
    """Step size from the convective and diffusive stability bounds.

    Terms with zero wave speed or zero diffusion drop out of the min; a
    problem with neither is rejected.
    """
    k = field.basis.k
    cflc, cfld = cfl.resolve(k)
    candidates = []
    if field.dim == 1:
        h = field.grid.h
        max_fp = problem.max_fp if problem.f is not None else 0.0
        max_ap = problem.max_ap if problem.a is not None else 0.0
        h_conv = h ** (4.0 / 3.0) if (k == 3 and cfl.p3_time_scaling) else h
        if max_fp > 0:
            candidates.append(cflc * h_conv / max_fp)
        if max_ap > 0:
            candidates.append(cfld * h * h / max_ap)
    else:
        hx, hy = field.grid.hx, field.grid.hy
        if velocity is not None:
            max_fp, max_gp = velocity.max_v1, velocity.max_v2
        else:
            max_fp = problem.max_fp if problem.f is not None else 0.0
            max_gp = problem.max_gp if problem.g is not None else 0.0
        max_ap = problem.max_ap if problem.a is not None else 0.0
        hx_conv = hx ** (4.0 / 3.0) if (k == 3 and cfl.p3_time_scaling) else hx
        hy_conv = hy ** (4.0 / 3.0) if (k == 3 and cfl.p3_time_scaling) else hy
        speed = max_fp / hx_conv + max_gp / hy_conv
        if speed > 0:
            candidates.append(cflc / speed)
        if max_ap > 0:
            candidates.append(cfld / max_ap / (1.0 / hx**2 + 1.0 / hy**2))
    if not candidates:
        raise MppdgError(
            f"problem {problem.name!r} has neither convection nor diffusion")
    return min(candidates)


def _make_velocity(problem, field: DGField, t: float):
    if field.dim != 2 or problem.velocity_mode is None:
        return None
    if problem.velocity_mode == "analytic":
        return analytic_velocity_data(problem, field.grid, field.basis, t)
    if problem.velocity_mode == "spectral":
        from .incompressible import spectral_velocity_data
        return spectral_velocity_data(field, problem)
    raise ValueError(f"unknown velocity mode {problem.velocity_mode!r}")


def ssprk3_step(field: DGField, problem, controls: StepControls, dt: float,
                t: float = 0.0, rhs_fn=None) -> tuple[DGField, LimiterReport]:
    """One SSP-RK3 step with optional TVB and MPP limiting.

    ``rhs_fn(field, t) -> (dcoeffs, flux_record)`` overrides the spatial
    operator; the default builds it from the problem. The TVB limiter is
    applied to each stage solution right after the stage update; the MPP
    limiter rewrites the mode-0 coefficients of the final combination.
    """
    if rhs_fn is None:
        def rhs_fn(fld, time):
            vel = _make_velocity(problem, fld, time)
            if fld.dim == 1:
                return semidiscrete_rhs_1d(fld, problem, controls.flux, t=time)
            return semidiscrete_rhs_2d(fld, problem, controls.flux, t=time,
                                       velocity=vel)

    def limit(fld):
        if controls.tvb_m is not None:
            return tvb_limiter(fld, controls.tvb_m)
        return fld

    stage_times = (t, t + dt, t + 0.5 * dt)
    l0, rec0 = rhs_fn(field, stage_times[0])
    u1 = limit(field.with_coeffs(field.coeffs + dt * l0))
    l1, rec1 = rhs_fn(u1, stage_times[1])
    u2 = limit(field.with_coeffs(field.coeffs + dt * (0.25 * l0 + 0.25 * l1)))
    l2, rec2 = rhs_fn(u2, stage_times[2])
    w0, w1, w2 = RK_STAGE_WEIGHTS
    out = limit(field.with_coeffs(
        field.coeffs + dt * (w0 * l0 + w1 * l1 + w2 * l2)))

    if not np.all(np.isfinite(out.coeffs)):
        raise NumericalFailureError("non-finite coefficients after RK step")

    if not controls.mpp:
        report = LimiterReport()
        return out, report

    bounds = BoundPair(field.u_min, field.u_max)
    ubar_n = field.cell_averages()
    coeffs = out.coeffs.copy()
    if field.dim == 1:
        high = w0 * rec0.values + w1 * rec1.values + w2 * rec2.values
        low = first_order_fluxes_1d(ubar_n, problem, field.grid)
        lam = dt / field.grid.h
        limited, report = apply_mpp_limiter_1d(
            high, low, ubar_n, bounds, lam, field.grid.boundary.is_periodic)
        coeffs[:, 0] = ubar_n - lam * (limited[1:] - limited[:-1])
    else:
        high_x = w0 * rec0.x + w1 * rec1.x + w2 * rec2.x
        high_y = w0 * rec0.y + w1 * rec1.y + w2 * rec2.y
        vel_n = _make_velocity(problem, field, t)
        low_x, low_y = first_order_fluxes_2d(ubar_n, problem, field.grid, vel_n)
        lam_x = dt / field.grid.hx
        lam_y = dt / field.grid.hy
        limx, limy, report = apply_mpp_limiter_2d(
            high_x, high_y, low_x, low_y, ubar_n, bounds, lam_x, lam_y,
            field.grid.x.boundary.is_periodic, field.grid.y.boundary.is_periodic)
        coeffs[:, :, 0] = (ubar_n - lam_x * (limx[1:] - limx[:-1])
                           - lam_y * (limy[:, 1:] - limy[:, :-1]))
    return out.with_coeffs(coeffs), report


@dataclass
class RunStats:
    """Aggregate record of one evolution."""

    steps: int = 0
    t_final: float = 0.0
    ubar_min: float = np.inf
    ubar_max: float = -np.inf
    limiter_activations: int = 0
    steps_with_activation: int = 0
    theta_min: float = 1.0

    def absorb(self, field: DGField, report: LimiterReport):
        self.steps += 1
        avgs = field.cell_averages()
        self.ubar_min = min(self.ubar_min, float(avgs.min()))
        self.ubar_max = max(self.ubar_max, float(avgs.max()))
        self.limiter_activations += report.n_active
        self.steps_with_activation += int(report.n_active > 0)
        self.theta_min = min(self.theta_min, report.theta_min)

    def to_json_dict(self) -> dict:
        return {
            "steps": self.steps,
            "t_final": self.t_final,
            "ubar_min": self.ubar_min,
            "ubar_max": self.ubar_max,
            "limiter_activations": self.limiter_activations,
            "steps_with_activation": self.steps_with_activation,
            "theta_min": self.theta_min,
        }


def evolve(field: DGField, problem, t_final: float,
           controls: StepControls | None = None,
           cfl: CflConfig | None = None,
           callback=None) -> tuple[DGField, RunStats]:
    """March to t_final, clipping the last step to land exactly on it."""
    if t_final < 0:
        raise ValueError("final time must be nonnegative")
    controls = controls or StepControls()
    cfl = cfl or CflConfig()
    stats = RunStats()
    avgs = field.cell_averages()
    stats.ubar_min = float(avgs.min())
    stats.ubar_max = float(avgs.max())
    t = 0.0
    while t < t_final:
        velocity = _make_velocity(problem, field, t)
        dt = compute_dt(field, problem, cfl, velocity)
        last = t + dt >= t_final
        if last:
            dt = t_final - t
        if dt <= 0 or not np.isfinite(dt):
            raise NumericalFailureError(f"bad step size {dt} at t={t}")
        try:
            field, report = ssprk3_step(field, problem, controls, dt, t=t)
        except NumericalFailureError as exc:
            raise NumericalFailureError(f"step {stats.steps + 1}: {exc}") from exc
        t = t_final if last else t + dt
        stats.absorb(field, report)
        if callback is not None:
            callback(field, t, report)
    stats.t_final = t
    return field, stats
