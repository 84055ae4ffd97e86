"""Registry of the benchmark problems, with fluxes, bounds and exact solutions.

Each problem bundles everything the solver needs: convective fluxes with
global wave-speed bounds, the diffusion function a(u) together with
a' (the isotropic diffusion coefficient in 2D) and its derivative, initial
data (with exact cell averages for discontinuous profiles), boundary
treatment, the solution bounds from the initial data, and the exact
solution where one exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import MppdgError
from .field import DGField, project_1d, project_2d, tables_1d, tables_2d
from .mesh import (
    COMPACT_ZERO,
    DIRICHLET,
    PERIODIC,
    Basis,
    BoundaryCondition,
    Grid1D,
    Grid2D,
    build_grid_1d,
    build_grid_2d,
)

TWO_PI = 2.0 * math.pi


def sampled_max_abs(fn, lo: float, hi: float, n: int = 10001) -> float:
    """Dense-sampling bound for max |fn| on [lo, hi]."""
    u = np.linspace(lo, hi, n)
    return float(np.max(np.abs(fn(u))))


@dataclass(frozen=True)
class Problem:
    """Immutable test-case descriptor; function members are pure."""

    name: str
    dim: int
    domain: tuple
    boundary: str
    bounds: tuple[float, float]
    u0: object
    params: dict = dc_field(default_factory=dict)
    u0_cell_average: object = None
    exact: object = None
    f: object = None
    g: object = None
    max_fp: float = 0.0
    max_gp: float = 0.0
    a: object = None
    a_prime: object = None
    a_second: object = None
    max_ap: float = 0.0
    velocity_mode: str | None = None
    psi: object = None
    velocity: object = None
    dirichlet_values: tuple[float, float] | None = None
    tvb_default: float | None = None

    @property
    def u_min(self) -> float:
        return self.bounds[0]

    @property
    def u_max(self) -> float:
        return self.bounds[1]


def make_grid(problem: Problem, cells):
    """Build the grid a problem lives on; cells is n (1D) or (nx, ny)."""
    if problem.dim == 1:
        a, b = problem.domain
        if problem.boundary == DIRICHLET:
            lv, rv = problem.dirichlet_values
            bc = BoundaryCondition(DIRICHLET, left_value=lv, right_value=rv)
        else:
            bc = BoundaryCondition(problem.boundary)
        return build_grid_1d(a, b, int(cells), bc)
    (ax, bx), (ay, by) = problem.domain
    if np.isscalar(cells):
        cells = (int(cells), int(cells))
    bc = BoundaryCondition(problem.boundary)
    return build_grid_2d((ax, bx), (ay, by), cells[0], cells[1], bc, bc)


def project_problem(problem: Problem, grid, basis: Basis) -> DGField:
    """L2-project the initial data, carrying the problem bounds."""
    kw = dict(u_min=problem.u_min, u_max=problem.u_max,
              cell_average=problem.u0_cell_average)
    if problem.dim == 1:
        return project_1d(problem.u0, grid, basis, **kw)
    return project_2d(problem.u0, grid, basis, **kw)


def exact_error(field: DGField, problem: Problem, t: float):
    """(L1, Linf) errors against the exact solution, k+2 Gauss points.

    L1 is the domain-averaged norm (integral divided by domain volume),
    which is the convention the reference error tables print.
    """
    if problem.exact is None:
        raise MppdgError(f"problem {problem.name!r} has no exact solution")
    k = field.basis.k
    nq = k + 2
    if field.dim == 1:
        tb = tables_1d(k, nq)
        grid: Grid1D = field.grid
        xq = grid.centers()[:, None] + 0.5 * grid.h * tb["x"][None, :]
        uh = np.einsum("jm,mq->jq", field.coeffs, tb["P"])
        diff = np.abs(uh - problem.exact(xq, t))
        l1 = float(0.5 * grid.h * np.einsum("jq,q->", diff, tb["w"]))
        return l1 / (grid.b - grid.a), float(diff.max())
    tb = tables_2d(k, nq)
    grid: Grid2D = field.grid
    X = (grid.x.centers()[:, None, None, None]
         + 0.5 * grid.hx * tb["x"][None, None, :, None])
    Y = (grid.y.centers()[None, :, None, None]
         + 0.5 * grid.hy * tb["x"][None, None, None, :])
    X, Y = np.broadcast_arrays(X, Y)
    uh = np.einsum("ijm,mqr->ijqr", field.coeffs, tb["phi"])
    diff = np.abs(uh - problem.exact(X, Y, t))
    ww = np.multiply.outer(tb["w"], tb["w"])
    l1 = float(0.25 * grid.hx * grid.hy * np.einsum("ijqr,qr->", diff, ww))
    vol = (grid.x.b - grid.x.a) * (grid.y.b - grid.y.a)
    return l1 / vol, float(diff.max())


def _interval_overlap(lo, hi, a, b):
    return max(0.0, min(hi, b) - max(lo, a))


def _box_average(x0, x1, y0, y1, bx, by, value=1.0):
    frac = (_interval_overlap(x0, x1, *bx) * _interval_overlap(y0, y1, *by)
            / ((x1 - x0) * (y1 - y0)))
    return value * frac


def _disc_average(x0, x1, y0, y1, r2: float) -> float:
    """Exact area fraction of {x^2 + y^2 < r2} in a rectangle.

    Integrates the chord length in x with Gauss rules between the points
    where the circle enters or leaves the strip, so every piece is smooth.
    """
    r = math.sqrt(r2)
    breaks = {x0, x1}
    for c in (r, -r):
        if x0 < c < x1:
            breaks.add(c)
    for yc in (abs(y0), abs(y1)):
        if yc < r:
            xc = math.sqrt(r2 - yc * yc)
            for c in (xc, -xc):
                if x0 < c < x1:
                    breaks.add(c)
    pts = sorted(breaks)
    nodes, weights = np.polynomial.legendre.leggauss(24)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes
        half = np.sqrt(np.maximum(r2 - x * x, 0.0))
        chord = np.maximum(0.0, np.minimum(half, y1) - np.maximum(-half, y0))
        total += 0.5 * (hi - lo) * float(weights @ chord)
    return total / ((x1 - x0) * (y1 - y0))


# ---------------------------------------------------------------------------
# 1D problems
# ---------------------------------------------------------------------------

def _linear_1d(eps: float = 1e-4) -> Problem:
    eps = float(eps)

    def u0(x):
        return np.sin(x) ** 4

    def exact(x, t):
        return (0.375
                - 0.5 * math.exp(-4 * eps * t) * np.cos(2 * (x - t))
                + 0.125 * math.exp(-16 * eps * t) * np.cos(4 * (x - t)))

    kw = {}
    if eps > 0:
        kw = dict(a=lambda u: eps * u, a_prime=lambda u: eps * np.ones_like(u),
                  max_ap=eps)
    return Problem(
        name="linear-1d", dim=1, domain=(0.0, TWO_PI), boundary=PERIODIC,
        bounds=(0.0, 1.0), u0=u0, exact=exact, params={"eps": eps},
        f=lambda u: u, max_fp=1.0, **kw)


def _jiangshu_advection() -> Problem:
    ac, z, delta, gamma = 0.5, -0.7, 0.005, 10.0
    beta = math.log(2.0) / (36 * delta**2)

    def gauss(x, center):
        return np.exp(-beta * (x - center) ** 2)

    def ellipse(x, center):
        return np.sqrt(np.maximum(1.0 - gamma**2 * (x - center) ** 2, 0.0))

    def u0(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = (x >= -0.8) & (x <= -0.6)
        out[m] = (gauss(x[m], z - delta) + gauss(x[m], z + delta)
                  + 4 * gauss(x[m], z)) / 6.0
        m = (x >= -0.4) & (x <= -0.2)
        out[m] = 1.0
        m = (x >= 0.0) & (x <= 0.2)
        out[m] = 1.0 - np.abs(10.0 * (x[m] - 0.1))
        m = (x >= 0.4) & (x <= 0.6)
        out[m] = (ellipse(x[m], ac - delta) + ellipse(x[m], ac + delta)
                  + 4 * ellipse(x[m], ac)) / 6.0
        return out

    def exact(x, t):
        shifted = np.mod(np.asarray(x) - t + 1.0, 2.0) - 1.0
        return u0(shifted)

    return Problem(
        name="jiangshu-advection", dim=1, domain=(-1.0, 1.0), boundary=PERIODIC,
        bounds=(0.0, 1.0), u0=u0, exact=exact,
        f=lambda u: u, max_fp=1.0, tvb_default=10.0)


def barenblatt(m: int):
    """Compactly supported self-similar porous-medium solution."""
    s = 1.0 / (m + 1)

    def profile(x, t):
        x = np.asarray(x, dtype=float)
        core = 1.0 - (s * (m - 1) / (2.0 * m)) * x**2 / t ** (2 * s)
        return t ** (-s) * np.maximum(core, 0.0) ** (1.0 / (m - 1))

    return profile


def _porous_medium(m: int = 2) -> Problem:
    m = int(m)
    if m < 2:
        raise ValueError("porous-medium exponent must be >= 2")
    bm = barenblatt(m)

    def a(u):
        return u**m

    def a_prime(u):
        return m * u ** (m - 1)

    return Problem(
        name="porous-medium", dim=1, domain=(-6.0, 6.0), boundary=COMPACT_ZERO,
        bounds=(0.0, float(bm(0.0, 1.0))), params={"m": m},
        u0=lambda x: bm(x, 1.0), exact=lambda x, t: bm(x, t + 1.0),
        a=a, a_prime=a_prime, max_ap=float(m), tvb_default=1.0)


def bl_flux(u):
    """S-shaped fractional-flow function of the Buckley-Leverett model."""
    u = np.asarray(u, dtype=float)
    return u**2 / (u**2 + (1.0 - u) ** 2)


def _bl_diffusion(eps: float):
    def a(u):
        u = np.asarray(u, dtype=float)
        uc = np.clip(u, 0.0, 1.0)
        return eps * (2.0 * uc**2 - (4.0 / 3.0) * uc**3)

    def a_prime(u):
        u = np.asarray(u, dtype=float)
        inside = (u >= 0.0) & (u <= 1.0)
        return eps * np.where(inside, 4.0 * u * (1.0 - u), 0.0)

    return a, a_prime


def _buckley_leverett_1d(eps: float = 0.01) -> Problem:
    eps = float(eps)
    a, a_prime = _bl_diffusion(eps)

    def u0(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 1.0 / 3.0, np.maximum(1.0 - 3.0 * x, 0.0), 0.0)

    return Problem(
        name="buckley-leverett-1d", dim=1, domain=(0.0, 1.0), boundary=DIRICHLET,
        dirichlet_values=(1.0, 0.0), bounds=(0.0, 1.0), params={"eps": eps},
        u0=u0, f=bl_flux, max_fp=sampled_max_abs(_bl_fprime, 0.0, 1.0),
        a=a, a_prime=a_prime, max_ap=eps, tvb_default=10.0)


def _bl_fprime(u):
    u = np.asarray(u, dtype=float)
    den = (u**2 + (1.0 - u) ** 2) ** 2
    return 2.0 * u * (1.0 - u) / den


# ---------------------------------------------------------------------------
# 2D problems
# ---------------------------------------------------------------------------

def _linear_2d(eps: float = 1e-4) -> Problem:
    eps = float(eps)

    def u0(x, y):
        return np.sin(x + y) ** 4

    def exact(x, y, t):
        return (0.375
                - 0.5 * math.exp(-8 * eps * t) * np.cos(2 * (x + y - 2 * t))
                + 0.125 * math.exp(-32 * eps * t) * np.cos(4 * (x + y - 2 * t)))

    kw = {}
    if eps > 0:
        kw = dict(a=lambda u: eps * u, a_prime=lambda u: eps * np.ones_like(u),
                  max_ap=eps)
    return Problem(
        name="linear-2d", dim=2, domain=((0.0, TWO_PI), (0.0, TWO_PI)),
        boundary=PERIODIC, bounds=(0.0, 1.0), u0=u0, exact=exact,
        params={"eps": eps}, f=lambda u: u, g=lambda u: u,
        max_fp=1.0, max_gp=1.0, **kw)


def _porous_medium_2d() -> Problem:
    half = 0.5

    def u0(x, y):
        inside = (np.abs(x) <= half) & (np.abs(y) <= half)
        return np.where(inside, 1.0, 0.0)

    def avg(x0, x1, y0, y1):
        return _box_average(x0, x1, y0, y1, (-half, half), (-half, half))

    return Problem(
        name="porous-medium-2d", dim=2, domain=((-1.0, 1.0), (-1.0, 1.0)),
        boundary=PERIODIC, bounds=(0.0, 1.0), u0=u0, u0_cell_average=avg,
        a=lambda u: u**2, a_prime=lambda u: 2.0 * u,
        a_second=lambda u: 2.0 * np.ones_like(u), max_ap=2.0, tvb_default=50.0)


def _bl_gravity_flux(u):
    return bl_flux(u) * (1.0 - 5.0 * (1.0 - np.asarray(u, dtype=float)) ** 2)


def _buckley_leverett_2d(eps: float = 0.01) -> Problem:
    eps = float(eps)
    r2 = 0.5

    def u0(x, y):
        return np.where(x**2 + y**2 < r2, 1.0, 0.0)

    def avg(x0, x1, y0, y1):
        return _disc_average(x0, x1, y0, y1, r2)

    def gp(u):
        h = 1e-6
        return (_bl_gravity_flux(u + h) - _bl_gravity_flux(u - h)) / (2 * h)

    return Problem(
        name="buckley-leverett-2d", dim=2,
        domain=((-1.5, 1.5), (-1.5, 1.5)), boundary=PERIODIC,
        bounds=(0.0, 1.0), params={"eps": eps}, u0=u0, u0_cell_average=avg,
        f=bl_flux, g=_bl_gravity_flux,
        max_fp=sampled_max_abs(_bl_fprime, 0.0, 1.0),
        max_gp=sampled_max_abs(gp, 0.0, 1.0),
        a=lambda u: eps * u, a_prime=lambda u: eps * np.ones_like(u),
        max_ap=eps, tvb_default=50.0)


def zalesak_profile(x, y):
    """Slotted disk, cone and cosine hump on [-pi, pi]^2 (standard layout)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = 0.3 * math.pi
    out = np.zeros(np.broadcast(x, y).shape)

    cx, cy = 0.5 * math.pi, 0.0
    d = np.sqrt((x - cx) ** 2 + (y - cy) ** 2)
    slot = (np.abs(x - cx) < 0.05 * math.pi) & (y - cy < 0.1 * math.pi)
    out = np.where((d <= r) & ~slot, 1.0, out)

    cx, cy = -0.5 * math.pi, 0.0
    d = np.sqrt((x - cx) ** 2 + (y - cy) ** 2)
    out = np.where(d <= r, np.maximum(1.0 - d / r, out), out)

    cx, cy = 0.0, -0.5 * math.pi
    d = np.sqrt((x - cx) ** 2 + (y - cy) ** 2)
    hump = 0.25 * (1.0 + np.cos(math.pi * np.minimum(d, r) / r))
    out = np.where(d <= r, np.maximum(hump, out), out)
    return out


def _viscosity_kwargs(re_inv: float) -> dict:
    if re_inv <= 0:
        return {}
    return dict(a=lambda u: re_inv * u,
                a_prime=lambda u: re_inv * np.ones_like(u),
                max_ap=re_inv)


def _rigid_rotation(re_inv: float = 0.01) -> Problem:
    re_inv = float(re_inv)

    def psi(t, x, y):
        return 0.5 * (x**2 + y**2)

    def velocity(t, x, y):
        return -np.asarray(y, dtype=float), np.asarray(x, dtype=float)

    return Problem(
        name="rigid-rotation", dim=2,
        domain=((-math.pi, math.pi), (-math.pi, math.pi)),
        boundary=COMPACT_ZERO, bounds=(0.0, 1.0), params={"re_inv": re_inv},
        u0=zalesak_profile, velocity_mode="analytic", psi=psi,
        velocity=velocity, tvb_default=50.0, **_viscosity_kwargs(re_inv))


def _swirling(re_inv: float = 0.01, t_period: float = 0.1) -> Problem:
    re_inv = float(re_inv)
    t_period = float(t_period)

    def gt(t):
        return math.cos(math.pi * t / t_period) / math.pi

    def psi(t, x, y):
        return -gt(t) * (0.5 * (1.0 + np.cos(x)) * np.cos(y) + 0.5 * np.cos(x))

    def velocity(t, x, y):
        v1 = -np.cos(0.5 * np.asarray(x)) ** 2 * np.sin(y) * gt(t)
        v2 = np.sin(x) * np.cos(0.5 * np.asarray(y)) ** 2 * gt(t)
        return v1, v2

    return Problem(
        name="swirling", dim=2,
        domain=((-math.pi, math.pi), (-math.pi, math.pi)),
        boundary=PERIODIC, bounds=(0.0, 1.0),
        params={"re_inv": re_inv, "t_period": t_period},
        u0=zalesak_profile, velocity_mode="analytic", psi=psi,
        velocity=velocity, tvb_default=50.0, **_viscosity_kwargs(re_inv))


def _ns_accuracy(re: float = 100.0) -> Problem:
    re = float(re)
    re_inv = 0.0 if math.isinf(re) else 1.0 / re

    def u0(x, y):
        return -2.0 * np.sin(x) * np.sin(y)

    def exact(x, y, t):
        return -2.0 * np.sin(x) * np.sin(y) * math.exp(-2.0 * t * re_inv)

    return Problem(
        name="ns-accuracy", dim=2, domain=((0.0, TWO_PI), (0.0, TWO_PI)),
        boundary=PERIODIC, bounds=(-2.0, 2.0), params={"re": re},
        u0=u0, exact=exact, velocity_mode="spectral",
        **_viscosity_kwargs(re_inv))


def _vortex_patch(re: float = 100.0) -> Problem:
    re = float(re)
    re_inv = 0.0 if math.isinf(re) else 1.0 / re
    bx = (0.5 * math.pi, 1.5 * math.pi)
    by_neg = (0.25 * math.pi, 0.75 * math.pi)
    by_pos = (1.25 * math.pi, 1.75 * math.pi)

    def u0(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inx = (x >= bx[0]) & (x <= bx[1])
        out = np.where(inx & (y >= by_neg[0]) & (y <= by_neg[1]), -1.0, 0.0)
        return np.where(inx & (y >= by_pos[0]) & (y <= by_pos[1]), 1.0, out)

    def avg(x0, x1, y0, y1):
        return (_box_average(x0, x1, y0, y1, bx, by_neg, value=-1.0)
                + _box_average(x0, x1, y0, y1, bx, by_pos, value=1.0))

    return Problem(
        name="vortex-patch", dim=2, domain=((0.0, TWO_PI), (0.0, TWO_PI)),
        boundary=PERIODIC, bounds=(-1.0, 1.0), params={"re": re},
        u0=u0, u0_cell_average=avg, velocity_mode="spectral",
        tvb_default=50.0, **_viscosity_kwargs(re_inv))


_REGISTRY = {
    "linear-1d": _linear_1d,
    "jiangshu-advection": _jiangshu_advection,
    "porous-medium": _porous_medium,
    "buckley-leverett-1d": _buckley_leverett_1d,
    "linear-2d": _linear_2d,
    "porous-medium-2d": _porous_medium_2d,
    "buckley-leverett-2d": _buckley_leverett_2d,
    "rigid-rotation": _rigid_rotation,
    "swirling": _swirling,
    "ns-accuracy": _ns_accuracy,
    "vortex-patch": _vortex_patch,
}


def list_problems() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str, **params) -> Problem:
    if name not in _REGISTRY:
        raise KeyError(f"unknown problem {name!r}; known: {list_problems()}")
    try:
        return _REGISTRY[name](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name!r}: {exc}") from None
