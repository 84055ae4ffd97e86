import numpy as np
import pytest

from mppdg.errors import NumericalFailureError
from mppdg.field import DGField, l2_norm, project_1d
from mppdg.mesh import Basis, build_grid_1d
from mppdg.operators import (
    DiffusiveFluxConfig,
    convective_flux,
    diffusive_fluxes_1d,
    first_order_fluxes_1d,
    semidiscrete_rhs_1d,
)
from mppdg.problems import get_problem, make_grid, project_problem
from mppdg.timestepping import CflConfig, StepControls, compute_dt, ssprk3_step


def test_lax_friedrichs_reduces_to_upwind_for_linear_flux():
    f = lambda u: u
    assert convective_flux(0.3, 0.9, f, 1.0) == pytest.approx(0.3, abs=1e-16)


def test_lax_friedrichs_consistency():
    f = lambda u: np.sin(u) + u**3
    for u in (-1.2, 0.0, 0.7):
        assert convective_flux(u, u, f, 2.5) == pytest.approx(f(u), rel=1e-15)


def test_lax_friedrichs_buckley_leverett_value():
    # oracle: bound |f'| by a dense scan, then evaluate the formula directly
    f = lambda u: u**2 / (u**2 + (1 - u) ** 2)
    u = np.linspace(0.0, 1.0, 1_000_001)
    fp = np.gradient(f(u), u)
    alpha = float(np.max(np.abs(fp)))
    expected = 0.5 * (f(0.2) + f(0.8)) - 0.5 * alpha * (0.8 - 0.2)
    got = convective_flux(0.2, 0.8, f, alpha)
    assert got == pytest.approx(expected, rel=1e-12)


def test_diffusive_flux_zero_jump_linear():
    a = lambda u: 1e-4 * u
    ap = lambda u: 1e-4 * np.ones_like(np.asarray(u, dtype=float))
    tilde, hat = diffusive_fluxes_1d(0.5, 0.5, 1.0, a, ap, alpha=10.0, h=0.1)
    assert tilde == pytest.approx(1e-4, rel=1e-14)
    assert hat == pytest.approx(5e-5, rel=1e-14)


def test_diffusive_flux_continuous_trace_quadratic():
    a = lambda u: np.asarray(u, dtype=float) ** 2
    ap = lambda u: 2.0 * np.asarray(u, dtype=float)
    q = 0.37
    tilde, hat = diffusive_fluxes_1d(1.0, 1.0, q, a, ap, alpha=10.0, h=0.2)
    assert tilde == pytest.approx(2.0 * q, rel=1e-14)
    assert hat == pytest.approx(1.0, rel=1e-15)


def test_diffusive_flux_parenthesization_variants():
    a = lambda u: np.asarray(u, dtype=float) ** 2
    ap = lambda u: 2.0 * np.asarray(u, dtype=float)
    args = dict(a=a, a_prime=ap, alpha=10.0, h=0.15)
    # hand evaluation: r = (0.16-0.04)/0.2 = 0.6
    tilde_std, _ = diffusive_fluxes_1d(0.2, 0.4, 0.1, form="standard", **args)
    assert tilde_std == pytest.approx(0.6 * 0.1 + (10 / 0.15) * 0.12, rel=1e-13)
    assert tilde_std == pytest.approx(8.06, rel=1e-13)
    tilde_printed, _ = diffusive_fluxes_1d(0.2, 0.4, 0.1, form="printed", **args)
    assert tilde_printed == pytest.approx(0.6 * (0.1 + (10 / 0.15) * 0.12), rel=1e-13)


def test_diffusive_flux_derivative_fallback_without_a_prime():
    a = lambda u: np.asarray(u, dtype=float) ** 3
    tilde_with, _ = diffusive_fluxes_1d(0.5, 0.5, 1.0, a,
                                        lambda u: 3 * np.asarray(u) ** 2,
                                        alpha=1.0, h=0.1)
    tilde_fd, _ = diffusive_fluxes_1d(0.5, 0.5, 1.0, a, None, alpha=1.0, h=0.1)
    assert tilde_fd == pytest.approx(tilde_with, rel=1e-8)


def _rhs(problem, n, k, form="standard"):
    grid = make_grid(problem, n)
    basis = Basis(k=k, dim=1)
    field = project_problem(problem, grid, basis)
    return field, semidiscrete_rhs_1d(field, problem, DiffusiveFluxConfig(form=form))


def test_constant_state_is_steady():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 24)
    basis = Basis(k=2, dim=1)
    field = project_1d(lambda x: 0.4 * np.ones_like(x), grid, basis,
                       u_min=0.0, u_max=1.0)
    rhs, _ = semidiscrete_rhs_1d(field, problem, DiffusiveFluxConfig())
    assert np.abs(rhs).max() < 1e-13


def test_rhs_mode0_matches_flux_record_bitwise():
    problem = get_problem("linear-1d")
    field, (rhs, rec) = _rhs(problem, 32, 2)
    expected = -(rec.values[1:] - rec.values[:-1]) / field.grid.h
    assert np.array_equal(rhs[:, 0], expected)


def test_rhs_conservation_periodic():
    problem = get_problem("linear-1d")
    field, (rhs, _) = _rhs(problem, 64, 2)
    total = float(np.sum(rhs[:, 0]) * field.grid.h)
    assert abs(total) < 1e-12 * field.grid.n


def test_advection_rhs_matches_analytic_cell_averages():
    # f(u) = u, a = 0: averages of L(u) should approximate -(sin)' averages
    problem = get_problem("linear-1d", eps=0.0)
    grid = make_grid(problem, 64)
    basis = Basis(k=2, dim=1)
    field = project_1d(np.sin, grid, basis, u_min=-1.0, u_max=1.0)
    rhs, _ = semidiscrete_rhs_1d(field, problem, DiffusiveFluxConfig())
    edges = grid.interfaces()
    exact = -(np.sin(edges[1:]) - np.sin(edges[:-1])) / grid.h
    err = np.abs(rhs[:, 0] - exact).max()
    assert err < grid.h**3


def test_one_step_l2_decay_linear_problem():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 64)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    dt = compute_dt(field, problem, CflConfig())
    nxt, _ = ssprk3_step(field, problem, StepControls(mpp=False), dt)
    assert l2_norm(nxt) <= l2_norm(field) * (1 + 1e-12)


def test_interior_residual_vanishes_for_polynomial_data():
    # global quadratic data with affine f and a: residual is in the space
    c0, c1 = 0.3, -0.8
    d0, d1 = 0.0, 0.05

    class Affine:
        name = "affine"
        f = staticmethod(lambda u: c0 + c1 * u)
        max_fp = abs(c1)
        a = staticmethod(lambda u: d0 + d1 * u)
        a_prime = staticmethod(lambda u: d1 * np.ones_like(np.asarray(u, dtype=float)))
        max_ap = d1

    grid = build_grid_1d(0.0, 1.0, 10, "compact_zero")
    basis = Basis(k=2, dim=1)
    poly = lambda x: 1 + x + 0.5 * x**2
    field = project_1d(poly, grid, basis)
    rhs, _ = semidiscrete_rhs_1d(field, Affine(), DiffusiveFluxConfig(alpha=10.0))
    # residual should equal -c1*u' + d1*u'' exactly on interior cells
    target = project_1d(lambda x: -c1 * (1 + x) + d1 * 1.0, grid, basis)
    np.testing.assert_allclose(rhs[2:-2], target.coeffs[2:-2], atol=1e-12)


def test_reflection_symmetry_pure_advection():
    problem = get_problem("linear-1d", eps=0.0)

    class Negated:
        name = "neg"
        f = staticmethod(lambda u: -u)
        max_fp = 1.0
        a = None
        a_prime = None
        max_ap = 0.0

    grid = make_grid(problem, 32)
    basis = Basis(k=2, dim=1)
    field = project_problem(problem, grid, basis)
    rhs, _ = semidiscrete_rhs_1d(field, problem, DiffusiveFluxConfig())

    signs = (-1.0) ** np.arange(basis.k + 1)
    reflected = field.with_coeffs(field.coeffs[::-1] * signs[None, :])
    rhs_r, _ = semidiscrete_rhs_1d(reflected, Negated(), DiffusiveFluxConfig())
    np.testing.assert_allclose(rhs_r, rhs[::-1] * signs[None, :], atol=1e-13)


def test_nan_flux_raises_numerical_failure():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 8)
    basis = Basis(k=1, dim=1)
    coeffs = np.zeros((8, 2))
    coeffs[3, 0] = np.nan
    field = DGField(grid=grid, basis=basis, coeffs=coeffs, u_min=0, u_max=1)
    with pytest.raises(NumericalFailureError):
        semidiscrete_rhs_1d(field, problem, DiffusiveFluxConfig())


def test_first_order_flux_consistency():
    problem = get_problem("buckley-leverett-1d")
    grid = make_grid(problem, 10)
    ubar = np.full(10, 0.6)
    flux = first_order_fluxes_1d(ubar, problem, grid)
    f = problem.f
    np.testing.assert_allclose(flux[1:-1], f(0.6), rtol=1e-14)


def test_first_order_flux_pure_diffusion_value():
    problem = get_problem("porous-medium", m=2)
    grid = make_grid(problem, 80)
    ubar = np.zeros(80)
    ubar[39] = 1.0
    ubar[40] = 0.0
    flux = first_order_fluxes_1d(ubar, problem, grid)
    # interface between cells 39 and 40: -(a(0) - a(1))/h = 1/0.15
    assert flux[40] == pytest.approx(1.0 / 0.15, rel=1e-13)
    assert flux[40] == pytest.approx(6.6666666, rel=1e-6)


def test_first_order_flux_linear_problem_algebra():
    problem = get_problem("linear-1d")
    eps = problem.params["eps"]
    grid = make_grid(problem, 16)
    rng = np.random.default_rng(0)
    ubar = rng.uniform(0, 1, 16)
    flux = first_order_fluxes_1d(ubar, problem, grid)
    ul = np.roll(ubar, 1)  # periodic: left neighbor of cell j
    expected = ul - eps * (ubar - ul) / grid.h
    np.testing.assert_allclose(flux[:-1], expected, rtol=1e-13)


def test_printed_flux_form_still_converges():
    # the alternative parenthesization is selectable and keeps the order
    from mppdg.problems import exact_error
    from mppdg.timestepping import evolve

    problem = get_problem("linear-1d")
    errs = []
    for n in (32, 64):
        grid = make_grid(problem, n)
        field = project_problem(problem, grid, Basis(k=2, dim=1))
        out, _ = evolve(field, problem, 1.0,
                        StepControls(mpp=True,
                                     flux=DiffusiveFluxConfig(form="printed")))
        errs.append(exact_error(out, problem, 1.0)[0])
    assert np.log2(errs[0] / errs[1]) > 2.7


def test_porous_medium_tracks_barenblatt():
    from mppdg.problems import exact_error
    from mppdg.timestepping import evolve

    problem = get_problem("porous-medium", m=2)
    grid = make_grid(problem, 40)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    out, _ = evolve(field, problem, 0.2, StepControls(mpp=True, tvb_m=1.0))
    l1, _ = exact_error(out, problem, 0.2)
    assert l1 < 2e-3
