import numpy as np
import pytest

from mppdg.errors import MppdgError
from mppdg.field import DGField, total_mass
from mppdg.mesh import Basis, build_grid_1d
from mppdg.operators import FluxRecord1D
from mppdg.problems import get_problem, make_grid, project_problem
from mppdg.timestepping import (
    RK_STAGE_WEIGHTS,
    CflConfig,
    StepControls,
    compute_dt,
    evolve,
    ssprk3_step,
)


def test_rk3_tableau_scalar_sink():
    # wire the stepper with L(u) = -u on a single k=0 cell; one step from
    # u=1 with dt=0.1 must reproduce the RK3 Taylor polynomial of exp(-dt)
    grid = build_grid_1d(0, 1, 1, "periodic")
    basis = Basis(k=0, dim=1)
    field = DGField(grid=grid, basis=basis, coeffs=np.array([[1.0]]),
                    u_min=-10, u_max=10)

    def sink_rhs(fld, t):
        return -fld.coeffs, FluxRecord1D(values=np.zeros(2))

    out, _ = ssprk3_step(field, problem=None, controls=StepControls(mpp=False),
                         dt=0.1, rhs_fn=sink_rhs)
    expected = 1 - 0.1 + 0.1**2 / 2 - 0.1**3 / 6
    assert expected == pytest.approx(0.90483333333333, abs=1e-14)
    assert out.coeffs[0, 0] == pytest.approx(expected, abs=1e-14)


def test_stage_weights_sum_to_one():
    assert sum(RK_STAGE_WEIGHTS) == pytest.approx(1.0, abs=1e-16)


def test_constant_data_unchanged_over_steps():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 16)
    basis = Basis(k=2, dim=1)
    coeffs = np.zeros((16, 3))
    coeffs[:, 0] = 0.5
    field = DGField(grid=grid, basis=basis, coeffs=coeffs, u_min=0, u_max=1)
    out, stats = evolve(field, problem, 0.5, StepControls(mpp=True))
    np.testing.assert_allclose(out.coeffs, coeffs, atol=1e-13)


def test_compute_dt_linear_1d():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 64)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    dt = compute_dt(field, problem, CflConfig())
    h = grid.h
    assert dt == pytest.approx(min(0.18 * h / 1.0, 0.01 * h**2 / 1e-4), rel=1e-14)
    assert dt == pytest.approx(0.18 * h, rel=1e-12)
    assert dt == pytest.approx(1.767e-2, rel=1e-3)


def test_compute_dt_pure_diffusion():
    problem = get_problem("porous-medium", m=2)  # a'(u)=2u, max over [0,1] = 2
    grid = make_grid(problem, 40)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    dt = compute_dt(field, problem, CflConfig())
    assert dt == pytest.approx(0.01 * grid.h**2 / 2.0, rel=1e-14)


def test_compute_dt_2d_formula():
    problem = get_problem("linear-2d")
    grid = make_grid(problem, 64)
    field = project_problem(problem, grid, Basis(k=2, dim=2))
    dt = compute_dt(field, problem, CflConfig())
    h = grid.hx
    expected = min(0.18 / (2.0 / h), (0.01 / 1e-4) / (2.0 / h**2))
    assert dt == pytest.approx(expected, rel=1e-14)


def test_compute_dt_p3_time_scaling():
    problem = get_problem("linear-1d", eps=0.0)
    grid = make_grid(problem, 32)
    field = project_problem(problem, grid, Basis(k=3, dim=1))
    dt43 = compute_dt(field, problem, CflConfig(p3_time_scaling=True))
    dt1 = compute_dt(field, problem, CflConfig(p3_time_scaling=False))
    assert dt43 == pytest.approx(0.1 * grid.h ** (4 / 3), rel=1e-14)
    assert dt1 == pytest.approx(0.1 * grid.h, rel=1e-14)


def test_compute_dt_rejects_empty_problem():
    problem = get_problem("linear-1d", eps=0.0)
    degenerate = type(problem)(**{**problem.__dict__, "f": None, "max_fp": 0.0})
    grid = make_grid(problem, 8)
    field = project_problem(problem, grid, Basis(k=1, dim=1))
    with pytest.raises(MppdgError):
        compute_dt(field, degenerate, CflConfig())


def test_stage_flux_accumulation_consistency():
    # the combined record equals the weighted sum of the three stage records
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 32)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    dt = compute_dt(field, problem, CflConfig())

    from mppdg.operators import DiffusiveFluxConfig, semidiscrete_rhs_1d

    records = []

    def recording_rhs(fld, t):
        rhs, rec = semidiscrete_rhs_1d(fld, problem, DiffusiveFluxConfig())
        records.append(rec.values)
        return rhs, rec

    out, _ = ssprk3_step(field, problem, StepControls(mpp=True), dt,
                         rhs_fn=recording_rhs)
    w0, w1, w2 = RK_STAGE_WEIGHTS
    combined = w0 * records[0] + w1 * records[1] + w2 * records[2]
    # reconstruct the combined flux from the mode-0 update actually applied
    lam = dt / grid.h
    ubar_new = out.cell_averages()
    ubar_old = field.cell_averages()
    dflux = (ubar_old - ubar_new) / lam
    np.testing.assert_allclose(dflux, combined[1:] - combined[:-1],
                               rtol=1e-12, atol=1e-14)


def test_mass_conservation_full_run_periodic():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 64)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    m0 = total_mass(field)
    for mpp in (True, False):
        out, _ = evolve(field, problem, 1.0, StepControls(mpp=mpp))
        assert total_mass(out) == pytest.approx(m0, rel=1e-11)


def test_evolve_zero_time_is_identity():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 16)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    out, stats = evolve(field, problem, 0.0, StepControls())
    assert stats.steps == 0
    assert np.array_equal(out.coeffs, field.coeffs)


def test_evolve_lands_exactly_on_final_time():
    problem = get_problem("linear-1d")
    grid = make_grid(problem, 16)
    field = project_problem(problem, grid, Basis(k=2, dim=1))
    t_final = 0.123456
    out, stats = evolve(field, problem, t_final, StepControls())
    assert stats.t_final == pytest.approx(t_final, abs=0.0)


@pytest.mark.parametrize("mpp,expect_nonneg", [(True, True), (False, False)])
def test_porous_medium_minimum_sign(mpp, expect_nonneg):
    # short run at reduced resolution; the full table is in acceptance
    problem = get_problem("porous-medium", m=2)
    grid = make_grid(problem, 80)
    field = project_problem(problem, grid, Basis(k=3, dim=1))
    out, stats = evolve(field, problem, 0.2, StepControls(mpp=mpp, tvb_m=1.0))
    if expect_nonneg:
        assert stats.ubar_min >= -1e-12
    else:
        assert stats.ubar_min < 0.0
