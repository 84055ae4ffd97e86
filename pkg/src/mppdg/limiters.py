"""Parametrized MPP flux limiter (1D and 2D) and the TVB moment limiter.

The MPP limiter rescales the antidiffusive part of the RK-combined
cell-average flux toward a first-order monotone flux, per interface, so
that updated cell averages stay inside the global solution bounds. The
per-cell case analysis produces box bounds Lambda; each interface takes
the minimum over its two adjacent cells.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CflViolationError

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class BoundPair:
    u_min: float
    u_max: float

    def __post_init__(self):
        if not self.u_min <= self.u_max:
            raise ValueError("lower bound exceeds upper bound")


@dataclass(frozen=True)
class GammaPair:
    """Headroom of the first-order update to each bound, per cell.

    gamma_max >= 0 and gamma_min <= 0 whenever the first-order scheme is
    bound-preserving under the step size in use; a violation is raised as a
    CFL error rather than clamped silently.
    """

    gamma_max: np.ndarray
    gamma_min: np.ndarray


@dataclass
class LimiterReport:
    """Per-interface theta and per-cell Lambda bounds, plus activity counts."""

    theta: np.ndarray | None = None          # 1D: (n+1,)
    theta_x: np.ndarray | None = None        # 2D: (nx+1, ny)
    theta_y: np.ndarray | None = None        # 2D: (nx, ny+1)
    lambda_max_bounds: dict = field(default_factory=dict)
    lambda_min_bounds: dict = field(default_factory=dict)
    n_active: int = 0
    theta_min: float = 1.0

    def to_json_dict(self, arrays: bool = False) -> dict:
        out = {"n_active": int(self.n_active), "theta_min": float(self.theta_min)}
        if arrays:
            for name in ("theta", "theta_x", "theta_y"):
                arr = getattr(self, name)
                if arr is not None:
                    out[name] = arr.tolist()
        return out


def minmod(a, b, c):
    """sign(a) * min(|a|, |b|, |c|) when all three agree in sign, else 0."""
    a = np.asarray(a, dtype=float)
    same = (np.sign(a) == np.sign(b)) & (np.sign(b) == np.sign(c)) & (np.sign(a) != 0)
    mag = np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    return np.where(same, np.sign(a) * mag, 0.0)


def compute_gamma(ubar: np.ndarray, low_flux_diff: np.ndarray,
                  bounds: BoundPair, tol: float = BOUND_SLACK) -> GammaPair:
    """Gamma from the first-order update ubar - low_flux_diff.

    ``low_flux_diff`` is the lambda-scaled flux difference of the monotone
    scheme (lambda*(h_plus - h_minus) in 1D, the two-direction sum in 2D).
    Tiny negative headroom from roundoff is clamped to zero after the
    tolerance check so that downstream ratios stay in [0, 1].
    """
    gmax = bounds.u_max - ubar + low_flux_diff
    gmin = bounds.u_min - ubar + low_flux_diff
    if gmax.min() < -tol or gmin.max() > tol:
        if gmax.min() < -tol:
            cell = np.unravel_index(int(np.argmin(gmax)), gmax.shape)
            detail = f"gamma_max={gmax.min():.3e} at cell {cell}"
        else:
            cell = np.unravel_index(int(np.argmax(gmin)), gmin.shape)
            detail = f"gamma_min={gmin.max():.3e} at cell {cell}"
        raise CflViolationError(
            f"first-order scheme violated the bounds ({detail}); reduce the time step")
    return GammaPair(gamma_max=np.maximum(gmax, 0.0), gamma_min=np.minimum(gmin, 0.0))


def limiter_bounds_1d(lam_f_minus: float, lam_f_plus: float,
                      gamma_max: float, gamma_min: float):
    """Per-cell box bounds from the eight-case analysis (scalar form).

    Arguments are the lambda-scaled antidiffusive fluxes at the cell's left
    and right interfaces. Returns (LM_minus, LM_plus, Lm_minus, Lm_plus),
    all in [0, 1].
    """
    fl, fr = lam_f_minus, lam_f_plus
    # upper bound: theta_l*fl - theta_r*fr <= gamma_max
    if fl <= 0.0 and fr >= 0.0:
        lm_m, lm_p = 1.0, 1.0
    elif fl <= 0.0 and fr < 0.0:
        lm_m, lm_p = 1.0, min(1.0, gamma_max / (-fr))
    elif fl > 0.0 and fr >= 0.0:
        lm_m, lm_p = min(1.0, gamma_max / fl), 1.0
    else:  # fl > 0 and fr < 0: coupled
        if fl - fr <= gamma_max:
            lm_m, lm_p = 1.0, 1.0
        else:
            shared = gamma_max / (fl - fr)
            lm_m, lm_p = shared, shared
    # lower bound: theta_l*fl - theta_r*fr >= gamma_min
    if fl >= 0.0 and fr <= 0.0:
        ln_m, ln_p = 1.0, 1.0
    elif fl >= 0.0 and fr > 0.0:
        ln_m, ln_p = 1.0, min(1.0, gamma_min / (-fr))
    elif fl < 0.0 and fr <= 0.0:
        ln_m, ln_p = min(1.0, gamma_min / fl), 1.0
    else:  # fl < 0 and fr > 0: coupled
        if fl - fr >= gamma_min:
            ln_m, ln_p = 1.0, 1.0
        else:
            shared = gamma_min / (fl - fr)
            ln_m, ln_p = shared, shared
    return lm_m, lm_p, ln_m, ln_p


@np.errstate(divide="ignore", over="ignore", invalid="ignore")
def _bounds_1d_vectorized(fl: np.ndarray, fr: np.ndarray,
                          gmax: np.ndarray, gmin: np.ndarray):
    """Vectorized eight-case analysis over all cells.

    Divisions are evaluated on all cells and masked afterwards; overflow in
    branches that are not taken is discarded by the masks.
    """
    one = np.ones_like(fl)

    def safe_div(num, den):
        return num / np.where(den == 0.0, 1.0, den)

    # upper bound
    lm_m = one.copy()
    lm_p = one.copy()
    case_b = (fl <= 0.0) & (fr < 0.0)
    lm_p = np.where(case_b, np.minimum(1.0, safe_div(gmax, -fr)), lm_p)
    case_c = (fl > 0.0) & (fr >= 0.0)
    lm_m = np.where(case_c, np.minimum(1.0, safe_div(gmax, fl)), lm_m)
    case_d = (fl > 0.0) & (fr < 0.0) & (fl - fr > gmax)
    shared = safe_div(gmax, fl - fr)
    lm_m = np.where(case_d, shared, lm_m)
    lm_p = np.where(case_d, shared, lm_p)

    # lower bound
    ln_m = one.copy()
    ln_p = one.copy()
    case_b = (fl >= 0.0) & (fr > 0.0)
    ln_p = np.where(case_b, np.minimum(1.0, safe_div(gmin, -fr)), ln_p)
    case_c = (fl < 0.0) & (fr <= 0.0)
    ln_m = np.where(case_c, np.minimum(1.0, safe_div(gmin, fl)), ln_m)
    case_d = (fl < 0.0) & (fr > 0.0) & (fl - fr < gmin)
    shared = safe_div(gmin, fl - fr)
    ln_m = np.where(case_d, shared, ln_m)
    ln_p = np.where(case_d, shared, ln_p)
    return lm_m, lm_p, ln_m, ln_p


def _limited_flux(theta, high, low):
    """theta-blend that returns the high flux bitwise where theta == 1."""
    return np.where(theta == 1.0, high, theta * (high - low) + low)


def apply_mpp_limiter_1d(high: np.ndarray, low: np.ndarray, ubar_n: np.ndarray,
                         bounds: BoundPair, lam: float, periodic: bool):
    """Limit RK-combined fluxes so updated averages stay in bounds.

    ``high`` and ``low`` are interface flux arrays of length n+1; for
    periodic grids entries 0 and n refer to the same physical interface and
    must carry identical values. Returns (limited fluxes, report).
    """
    n = ubar_n.shape[0]
    gamma = compute_gamma(ubar_n, lam * (low[1:] - low[:-1]), bounds)
    lam_f = lam * (high - low)
    fl = lam_f[:-1]   # per cell, left interface
    fr = lam_f[1:]    # per cell, right interface
    lm_m, lm_p, ln_m, ln_p = _bounds_1d_vectorized(
        fl, fr, gamma.gamma_max, gamma.gamma_min)

    theta = np.ones(n + 1)
    # interface i sits between cell i-1 (plus side) and cell i (minus side)
    theta[1:-1] = np.minimum(
        np.minimum(lm_p[:-1], lm_m[1:]),
        np.minimum(ln_p[:-1], ln_m[1:]))
    if periodic:
        wrap = min(lm_p[-1], lm_m[0], ln_p[-1], ln_m[0])
        theta[0] = wrap
        theta[-1] = wrap
    else:
        theta[0] = min(lm_m[0], ln_m[0])
        theta[-1] = min(lm_p[-1], ln_p[-1])

    limited = _limited_flux(theta, high, low)
    updated = ubar_n - lam * (limited[1:] - limited[:-1])
    if (updated.min() < bounds.u_min - BOUND_SLACK
            or updated.max() > bounds.u_max + BOUND_SLACK):
        raise CflViolationError(
            f"limited update left bounds: [{updated.min()}, {updated.max()}]"
            f" vs [{bounds.u_min}, {bounds.u_max}]")
    report = LimiterReport(
        theta=theta,
        lambda_max_bounds={"minus": lm_m, "plus": lm_p},
        lambda_min_bounds={"minus": ln_m, "plus": ln_p},
        n_active=int(np.count_nonzero(theta < 1.0)),
        theta_min=float(theta.min()),
    )
    return limited, report


@np.errstate(divide="ignore", over="ignore", invalid="ignore")
def limiter_bounds_2d(f_left, f_right, f_down, f_up, gamma_max, gamma_min):
    """Group scaling of the four oriented antidiffusive fluxes per cell.

    Inputs follow the printed sign convention: left/bottom keep +lambda*F,
    right/top carry a built-in minus sign. All strictly positive entries
    share min(gamma_max / sum_positive, 1) for the upper bound; strictly
    negative entries share min(gamma_min / sum_negative, 1) for the lower
    bound; all other entries get 1.
    """
    stack = np.stack([f_left, f_right, f_down, f_up])
    pos = stack > 0.0
    neg = stack < 0.0
    sum_pos = np.sum(np.where(pos, stack, 0.0), axis=0)
    sum_neg = np.sum(np.where(neg, stack, 0.0), axis=0)
    scale_max = np.minimum(gamma_max / np.where(sum_pos > 0.0, sum_pos, 1.0), 1.0)
    scale_min = np.minimum(gamma_min / np.where(sum_neg < 0.0, sum_neg, -1.0), 1.0)
    lam_max = np.where(pos, scale_max[None], 1.0)
    lam_min = np.where(neg, scale_min[None], 1.0)
    return lam_max, lam_min


def apply_mpp_limiter_2d(high_x, high_y, low_x, low_y, ubar_n,
                         bounds: BoundPair, lam_x: float, lam_y: float,
                         periodic_x: bool, periodic_y: bool):
    """2D limiting on edge-integrated average fluxes; see the 1D variant."""
    low_diff = (lam_x * (low_x[1:] - low_x[:-1])
                + lam_y * (low_y[:, 1:] - low_y[:, :-1]))
    gamma = compute_gamma(ubar_n, low_diff, bounds)

    f_left = lam_x * (high_x[:-1] - low_x[:-1])
    f_right = -lam_x * (high_x[1:] - low_x[1:])
    f_down = lam_y * (high_y[:, :-1] - low_y[:, :-1])
    f_up = -lam_y * (high_y[:, 1:] - low_y[:, 1:])

    lam_max, lam_min = limiter_bounds_2d(
        f_left, f_right, f_down, f_up, gamma.gamma_max, gamma.gamma_min)
    lam_cell = np.minimum(lam_max, lam_min)  # (4, nx, ny): L, R, D, U
    lam_l, lam_r, lam_d, lam_u = lam_cell

    nx, ny = ubar_n.shape
    theta_x = np.ones((nx + 1, ny))
    theta_x[1:-1] = np.minimum(lam_r[:-1], lam_l[1:])
    if periodic_x:
        wrap = np.minimum(lam_r[-1], lam_l[0])
        theta_x[0] = wrap
        theta_x[-1] = wrap
    else:
        theta_x[0] = lam_l[0]
        theta_x[-1] = lam_r[-1]

    theta_y = np.ones((nx, ny + 1))
    theta_y[:, 1:-1] = np.minimum(lam_u[:, :-1], lam_d[:, 1:])
    if periodic_y:
        wrap = np.minimum(lam_u[:, -1], lam_d[:, 0])
        theta_y[:, 0] = wrap
        theta_y[:, -1] = wrap
    else:
        theta_y[:, 0] = lam_d[:, 0]
        theta_y[:, -1] = lam_u[:, -1]

    limited_x = _limited_flux(theta_x, high_x, low_x)
    limited_y = _limited_flux(theta_y, high_y, low_y)
    updated = (ubar_n - lam_x * (limited_x[1:] - limited_x[:-1])
               - lam_y * (limited_y[:, 1:] - limited_y[:, :-1]))
    if (updated.min() < bounds.u_min - BOUND_SLACK
            or updated.max() > bounds.u_max + BOUND_SLACK):
        raise CflViolationError(
            f"limited update left bounds: [{updated.min()}, {updated.max()}]")
    n_active = int(np.count_nonzero(theta_x < 1.0) + np.count_nonzero(theta_y < 1.0))
    report = LimiterReport(
        theta_x=theta_x, theta_y=theta_y,
        lambda_max_bounds={"L": lam_max[0], "R": lam_max[1],
                           "D": lam_max[2], "U": lam_max[3]},
        lambda_min_bounds={"L": lam_min[0], "R": lam_min[1],
                           "D": lam_min[2], "U": lam_min[3]},
        n_active=n_active,
        theta_min=float(min(theta_x.min(), theta_y.min())),
    )
    return limited_x, limited_y, report


# ---------------------------------------------------------------------------
# TVB minmod moment limiter
# ---------------------------------------------------------------------------

def tvb_limiter(field, m_tvb: float):
    """Cockburn-Shu TVB limiter on the modal field; returns a new field.

    Cells whose interface deviations pass the M*h^2 test are untouched
    bitwise. Triggered cells are rebuilt as linears with minmod-limited
    slopes (per direction in 2D) and zeroed higher modes.
    """
    if field.basis.k < 1:
        return field
    if field.dim == 1:
        return _tvb_1d(field, m_tvb)
    return _tvb_2d(field, m_tvb)


def _tvb_1d(field, m_tvb: float):
    from .operators import pad_values_1d
    from .field import tables_1d

    grid = field.grid
    tb = tables_1d(field.basis.k, field.basis.k + 1)
    coeffs = field.coeffs
    ubar = coeffs[:, 0]
    u_right = coeffs @ tb["P_right"]
    u_left = coeffs @ tb["P_left"]
    dev_r = u_right - ubar
    dev_l = ubar - u_left
    padded = pad_values_1d(ubar, grid.boundary)
    dplus = padded[2:] - ubar
    dminus = ubar - padded[:-2]

    threshold = m_tvb * grid.h**2
    mod_r = np.where(np.abs(dev_r) <= threshold, dev_r, minmod(dev_r, dplus, dminus))
    mod_l = np.where(np.abs(dev_l) <= threshold, dev_l, minmod(dev_l, dplus, dminus))
    trigger = (mod_r != dev_r) | (mod_l != dev_l)
    if not trigger.any():
        return field
    out = coeffs.copy()
    slope = minmod(coeffs[:, 1], dplus, dminus)
    out[trigger, 1] = slope[trigger]
    out[trigger, 2:] = 0.0
    return field.with_coeffs(out)


def _tvb_2d(field, m_tvb: float):
    from .operators import pad_values_1d

    grid = field.grid
    basis = field.basis
    pairs = basis.mode_pairs
    coeffs = field.coeffs
    ubar = coeffs[:, :, 0]
    ix10 = pairs.index((1, 0))
    ix01 = pairs.index((0, 1))

    # edge-mean deviations: only n=0 (resp. m=0) modes survive the average
    sgn = np.array([(-1.0) ** m for m, _ in pairs])
    mask_x = np.array([n == 0 and m >= 1 for m, n in pairs], dtype=float)
    mask_y = np.array([m == 0 and n >= 1 for m, n in pairs], dtype=float)
    sgn_y = np.array([(-1.0) ** n for _, n in pairs])
    dev_xr = coeffs @ mask_x
    dev_xl = -coeffs @ (mask_x * sgn)
    dev_yt = coeffs @ mask_y
    dev_yb = -coeffs @ (mask_y * sgn_y)

    padx = pad_values_1d(ubar, grid.x.boundary, axis=0)
    pady = pad_values_1d(ubar, grid.y.boundary, axis=1)
    dplus_x = padx[2:] - ubar
    dminus_x = ubar - padx[:-2]
    dplus_y = pady[:, 2:] - ubar
    dminus_y = ubar - pady[:, :-2]

    thx = m_tvb * grid.hx**2
    thy = m_tvb * grid.hy**2
    mod_xr = np.where(np.abs(dev_xr) <= thx, dev_xr, minmod(dev_xr, dplus_x, dminus_x))
    mod_xl = np.where(np.abs(dev_xl) <= thx, dev_xl, minmod(dev_xl, dplus_x, dminus_x))
    mod_yt = np.where(np.abs(dev_yt) <= thy, dev_yt, minmod(dev_yt, dplus_y, dminus_y))
    mod_yb = np.where(np.abs(dev_yb) <= thy, dev_yb, minmod(dev_yb, dplus_y, dminus_y))
    trigger = ((mod_xr != dev_xr) | (mod_xl != dev_xl)
               | (mod_yt != dev_yt) | (mod_yb != dev_yb))
    if not trigger.any():
        return field
    out = coeffs.copy()
    slope_x = minmod(coeffs[:, :, ix10], dplus_x, dminus_x)
    slope_y = minmod(coeffs[:, :, ix01], dplus_y, dminus_y)
    out[trigger] = 0.0
    out[trigger, 0] = ubar[trigger]
    out[trigger, ix10] = slope_x[trigger]
    out[trigger, ix01] = slope_y[trigger]
    return field.with_coeffs(out)
