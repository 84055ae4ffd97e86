import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mppdg.errors import CflViolationError
from mppdg.field import project_1d
from mppdg.limiters import (
    BoundPair,
    apply_mpp_limiter_1d,
    apply_mpp_limiter_2d,
    compute_gamma,
    limiter_bounds_1d,
    limiter_bounds_2d,
    minmod,
    tvb_limiter,
)
from mppdg.mesh import Basis, build_grid_1d
from mppdg.operators import first_order_fluxes_1d
from mppdg.problems import get_problem, make_grid, project_problem
from mppdg.timestepping import CflConfig, StepControls, compute_dt, evolve

from _oracles import oracle_theta_1d, oracle_theta_2d, random_instance_1d

# ---------------------------------------------------------------------------
# unit examples
# ---------------------------------------------------------------------------


def test_minmod_values():
    assert minmod(0.5, 0.2, 0.9) == pytest.approx(0.2)
    assert minmod(-0.5, -0.2, -0.9) == pytest.approx(-0.2)
    assert minmod(0.5, -0.2, 0.9) == 0.0
    assert minmod(0.5, 0.0, 0.9) == 0.0


def test_gamma_simple_values():
    bounds = BoundPair(0.0, 1.0)
    g = compute_gamma(np.array([1.0, 0.3]), np.zeros(2), bounds)
    assert g.gamma_max[0] == pytest.approx(0.0, abs=1e-15)
    assert g.gamma_min[0] == pytest.approx(-1.0)
    g = compute_gamma(np.array([0.5]), np.array([0.1]), bounds)
    assert g.gamma_max[0] == pytest.approx(0.6)
    assert g.gamma_min[0] == pytest.approx(-0.4)


def test_gamma_violation_raises():
    bounds = BoundPair(0.0, 1.0)
    with pytest.raises(CflViolationError):
        compute_gamma(np.array([0.5]), np.array([0.7]), bounds)


def test_gamma_porous_medium_first_step():
    problem = get_problem("porous-medium", m=2)
    grid = make_grid(problem, 80)
    field = project_problem(problem, grid, Basis(k=3, dim=1))
    ubar = field.cell_averages()
    dt = compute_dt(field, problem, CflConfig())
    low = first_order_fluxes_1d(ubar, problem, grid)
    lam = dt / grid.h
    g = compute_gamma(ubar, lam * (low[1:] - low[:-1]),
                      BoundPair(problem.u_min, problem.u_max))
    assert g.gamma_max.min() >= 0.0
    assert g.gamma_min.max() <= 0.0


def test_case_analysis_no_limiting_needed():
    lm_m, lm_p, _, _ = limiter_bounds_1d(-0.4, 0.7, gamma_max=0.2, gamma_min=-0.2)
    assert (lm_m, lm_p) == (1.0, 1.0)


def test_case_analysis_coupled_case():
    # lam*F- = 0.3, lam*F+ = -0.2, Gamma = 0.1: both get 0.1/0.5 = 0.2, and
    # the upper-bound inequality holds with equality
    lm_m, lm_p, _, _ = limiter_bounds_1d(0.3, -0.2, gamma_max=0.1, gamma_min=-9.0)
    assert lm_m == pytest.approx(0.2)
    assert lm_p == pytest.approx(0.2)
    assert lm_m * 0.3 - lm_p * (-0.2) == pytest.approx(0.1, abs=1e-15)


def test_case_analysis_one_sided_case():
    lm_m, lm_p, _, _ = limiter_bounds_1d(-0.1, -0.4, gamma_max=0.2, gamma_min=-9.0)
    assert (lm_m, lm_p) == (1.0, 0.5)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 1), st.floats(-1, 0))
@settings(max_examples=300)
def test_case_analysis_always_in_unit_interval(fl, fr, gmax, gmin):
    out = limiter_bounds_1d(fl, fr, gmax, gmin)
    assert all(0.0 <= v <= 1.0 for v in out)
    # the box certified by the case analysis is feasible at its corner
    lm_m, lm_p, ln_m, ln_p = out
    tm, tp = min(lm_m, ln_m), min(lm_p, ln_p)
    assert tm * fl - tp * fr <= gmax + 1e-12
    assert tm * fl - tp * fr >= gmin - 1e-12


def test_apply_1d_zero_antidiffusive_flux():
    n = 8
    rng = np.random.default_rng(1)
    ubar = rng.uniform(0, 1, n)
    low = rng.normal(0, 0.05, n + 1)
    low[-1] = low[0]
    lam = 0.1
    limited, report = apply_mpp_limiter_1d(low.copy(), low, ubar,
                                           BoundPair(-10, 10), lam, True)
    assert np.array_equal(limited, low)
    assert report.theta_min == 1.0
    assert report.n_active == 0


def test_apply_1d_theta_one_returns_high_flux_bitwise():
    rng = np.random.default_rng(2)
    n = 16
    ubar = rng.uniform(0.3, 0.7, n)
    low = np.zeros(n + 1)
    high = rng.normal(0, 1e-3, n + 1)
    high[-1] = high[0]
    limited, report = apply_mpp_limiter_1d(high, low, ubar,
                                           BoundPair(0.0, 1.0), 0.1, True)
    assert report.theta_min == 1.0
    assert np.array_equal(limited, high)


def test_apply_1d_crafted_overshoot_scan():
    # three periodic cells; the high flux pushes the first cell above u_max
    ubar = np.array([1.0, 1.0, 0.2])
    low = np.zeros(4)
    high = np.array([0.3, -0.3, 0.1, 0.3])
    lam = 0.5
    bounds = BoundPair(0.0, 1.0)
    unlimited = ubar - lam * (high[1:] - high[:-1])
    assert unlimited[0] > 1.0
    limited, report = apply_mpp_limiter_1d(high, low, ubar, bounds, lam, True)
    updated = ubar - lam * (limited[1:] - limited[:-1])
    assert updated.max() <= 1.0 + 1e-12
    assert updated.min() >= -1e-12
    theta = report.theta
    assert theta[0] < 1.0 and theta[1] < 1.0
    assert theta[0] == theta[3]

    # brute-force scan of the two offending interface thetas
    grid_t = np.linspace(0.0, 1.0, 2000)
    t0, t1 = np.meshgrid(grid_t, grid_t, indexing="ij")
    t2 = theta[2]
    h = [t0 * high[0], t1 * high[1], t2 * high[2], t0 * high[3]]
    feasible = np.ones_like(t0, dtype=bool)
    for j in range(3):
        upd = ubar[j] - lam * (h[j + 1] - h[j])
        feasible &= (upd <= 1.0 + 1e-12) & (upd >= -1e-12)
    # the returned pair is feasible (boundary or interior of the scanned set)
    i0 = np.searchsorted(grid_t, theta[0])
    i1 = np.searchsorted(grid_t, theta[1])
    assert feasible[min(i0, 1999), min(i1, 1999)] or theta[0] == 0.0
    # and componentwise maximal among scanned feasible pairs
    dominating = (feasible & (t0 >= theta[0]) & (t1 >= theta[1])
                  & ((t0 > theta[0] + 1 / 2000) | (t1 > theta[1] + 1 / 2000)))
    assert not dominating.any()


def test_apply_1d_matches_scalar_oracle_on_random_instances():
    rng = np.random.default_rng(1234)
    for trial in range(1000):
        n = int(rng.integers(2, 7))
        high, low, ubar, u_min, u_max, lam = random_instance_1d(rng, n)
        limited, report = apply_mpp_limiter_1d(
            high, low, ubar, BoundPair(u_min, u_max), lam, True)
        expected = oracle_theta_1d(high, low, ubar, u_min, u_max, lam, True)
        np.testing.assert_allclose(report.theta, expected, atol=1e-15)
        # feasibility: the limited update honors the bounds
        updated = ubar - lam * (limited[1:] - limited[:-1])
        assert updated.min() >= u_min - 1e-12
        assert updated.max() <= u_max + 1e-12
        assert report.theta.min() >= 0.0 and report.theta.max() <= 1.0


def test_theta_never_decreases_when_bounds_widen():
    rng = np.random.default_rng(77)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        high, low, ubar, u_min, u_max, lam = random_instance_1d(rng, n)
        _, tight = apply_mpp_limiter_1d(high, low, ubar,
                                        BoundPair(u_min, u_max), lam, True)
        _, wide = apply_mpp_limiter_1d(high, low, ubar,
                                       BoundPair(u_min - 0.3, u_max + 0.3),
                                       lam, True)
        assert np.all(wide.theta >= tight.theta - 1e-15)


def test_limiter_is_conservative():
    rng = np.random.default_rng(5)
    n = 12
    high, low, ubar, u_min, u_max, lam = random_instance_1d(rng, n)
    limited, _ = apply_mpp_limiter_1d(high, low, ubar,
                                      BoundPair(u_min, u_max), lam, True)
    upd_lim = ubar - lam * (limited[1:] - limited[:-1])
    upd_raw = ubar - lam * (high[1:] - high[:-1])
    assert np.sum(upd_lim) == pytest.approx(np.sum(upd_raw), rel=1e-12)


# ---------------------------------------------------------------------------
# 2D limiter
# ---------------------------------------------------------------------------


def test_2d_bounds_no_positive_entries():
    shape = (1, 1)
    z = np.full(shape, -0.1)
    lam_max, lam_min = limiter_bounds_2d(z, z, z, z, np.full(shape, 0.5),
                                         np.full(shape, -0.5))
    assert np.all(lam_max == 1.0)


def test_2d_bounds_shared_scaling_example():
    shape = (1, 1)
    pos = np.full(shape, 0.3)
    neg = np.full(shape, -0.05)
    lam_max, _ = limiter_bounds_2d(pos, pos, neg, neg, np.full(shape, 0.3),
                                   np.full(shape, -5.0))
    assert lam_max[0][0, 0] == pytest.approx(0.5)
    assert lam_max[1][0, 0] == pytest.approx(0.5)
    assert lam_max[2][0, 0] == 1.0
    assert lam_max[3][0, 0] == 1.0


def test_apply_2d_matches_scalar_oracle():
    rng = np.random.default_rng(42)
    for _ in range(100):
        nx, ny = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        ubar = rng.uniform(0, 1, (nx, ny))
        lam_x, lam_y = rng.uniform(0.02, 0.15, 2)
        # first-order upwind fluxes of linear advection (periodic)
        lx = np.empty((nx + 1, ny))
        lx[1:] = ubar
        lx[0] = ubar[-1]
        ly = np.empty((nx, ny + 1))
        ly[:, 1:] = ubar
        ly[:, 0] = ubar[:, -1]
        hx = lx + rng.normal(0, 0.5, lx.shape)
        hx[-1] = hx[0]
        hy = ly + rng.normal(0, 0.5, ly.shape)
        hy[:, -1] = hy[:, 0]
        limx, limy, report = apply_mpp_limiter_2d(
            hx, hy, lx, ly, ubar, BoundPair(0.0, 1.0), lam_x, lam_y, True, True)
        tx, ty = oracle_theta_2d(hx, hy, lx, ly, ubar, 0.0, 1.0, lam_x, lam_y)
        np.testing.assert_allclose(report.theta_x, tx, atol=1e-15)
        np.testing.assert_allclose(report.theta_y, ty, atol=1e-15)
        updated = (ubar - lam_x * (limx[1:] - limx[:-1])
                   - lam_y * (limy[:, 1:] - limy[:, :-1]))
        assert updated.min() >= -1e-12
        assert updated.max() <= 1.0 + 1e-12


@pytest.mark.acceptance
def test_apply_2d_buckley_leverett_16_bounds():
    problem = get_problem("buckley-leverett-2d")
    grid = make_grid(problem, 16)
    field = project_problem(problem, grid, Basis(k=2, dim=2))
    final, stats = evolve(field, problem, 0.5,
                          StepControls(mpp=True, tvb_m=50.0))
    assert stats.ubar_min >= -1e-12
    assert stats.ubar_max <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# TVB limiter
# ---------------------------------------------------------------------------


def test_tvb_leaves_smooth_quadratic_untouched_bitwise():
    grid = build_grid_1d(0, 1, 16, "periodic")
    basis = Basis(k=2, dim=1)
    field = project_1d(lambda x: np.sin(2 * np.pi * x), grid, basis)
    out = tvb_limiter(field, m_tvb=1000.0)
    assert out.coeffs is field.coeffs  # untouched, not even copied


def test_tvb_flattens_isolated_spike():
    grid = build_grid_1d(0, 1, 3, "periodic")
    basis = Basis(k=1, dim=1)
    coeffs = np.zeros((3, 2))
    coeffs[1, 1] = 0.5  # slope in a cell whose neighbors share its average
    from mppdg.field import DGField

    field = DGField(grid=grid, basis=basis, coeffs=coeffs)
    out = tvb_limiter(field, m_tvb=0.0)
    np.testing.assert_array_equal(out.coeffs[1], [0.0, 0.0])


@pytest.mark.acceptance
def test_tvb_advection_profile_stays_bounded():
    problem = get_problem("jiangshu-advection")
    grid = make_grid(problem, 200)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    tv0 = float(np.abs(np.diff(field.cell_averages())).sum())
    final, stats = evolve(field, problem, 8.0,
                          StepControls(mpp=True, tvb_m=10.0))
    assert np.all(np.isfinite(final.coeffs))
    assert stats.ubar_min >= -1e-12
    assert stats.ubar_max <= 1.0 + 1e-12
    tv = float(np.abs(np.diff(final.cell_averages())).sum())
    assert tv <= tv0 + 1.0
