"""Run orchestration: single simulations, convergence sweeps, bound reports.

Outputs are CSV (cell centers and averages) plus JSON reports that
validate against schemas/report.schema.json. Sweeps can run meshes on a
thread pool sized by the MPPDG_THREADS environment variable (0 = auto);
each individual run is sequential, so outputs are bitwise reproducible.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .field import DGField
from .mesh import Basis
from .operators import DiffusiveFluxConfig
from .problems import exact_error, get_problem, make_grid, project_problem
from .timestepping import CflConfig, StepControls, evolve

REPORT_SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Everything needed to reproduce one simulation."""

    problem: str
    params: dict = dc_field(default_factory=dict)
    order: int = 2
    cells: int | tuple = 64
    t_final: float = 1.0
    cflc: float | None = None
    cfld: float | None = None
    p3_time_scaling: bool = True
    mpp: bool = True
    tvb: float | None = None        # None = problem default, 0 disables
    flux_form: str = "standard"
    penalty_alpha: float | None = None
    out_dir: str | None = None
    seed: int = 0                   # reserved for synthetic-instance generation

    def build(self):
        problem = get_problem(self.problem, **self.params)
        grid = make_grid(problem, self.cells)
        basis = Basis(k=self.order, dim=problem.dim)
        tvb = problem.tvb_default if self.tvb is None else self.tvb
        if tvb is not None and tvb <= 0:
            tvb = None
        controls = StepControls(
            mpp=self.mpp, tvb_m=tvb,
            flux=DiffusiveFluxConfig(alpha=self.penalty_alpha, form=self.flux_form))
        cfl = CflConfig(cflc=self.cflc, cfld=self.cfld,
                        p3_time_scaling=self.p3_time_scaling)
        return problem, grid, basis, controls, cfl

    def to_json_dict(self) -> dict:
        return {
            "problem": self.problem, "params": self.params, "order": self.order,
            "cells": list(self.cells) if isinstance(self.cells, tuple) else self.cells,
            "t_final": self.t_final, "cflc": self.cflc, "cfld": self.cfld,
            "p3_time_scaling": self.p3_time_scaling, "mpp": self.mpp,
            "tvb": self.tvb, "flux_form": self.flux_form,
            "penalty_alpha": self.penalty_alpha, "seed": self.seed,
        }


@dataclass
class ConvergenceTable:
    """Mesh sequence with errors, observed orders and average bounds."""

    rows: list = dc_field(default_factory=list)

    def add(self, cells, l1, linf, ubar_min, ubar_max):
        prev = self.rows[-1] if self.rows else None
        order_l1 = order_linf = None
        if prev is not None and l1 > 0 and prev["l1"] > 0:
            ratio = prev["cells"] if np.isscalar(prev["cells"]) else prev["cells"][0]
            here = cells if np.isscalar(cells) else cells[0]
            denom = math.log2(here / ratio)
            order_l1 = math.log2(prev["l1"] / l1) / denom
            order_linf = math.log2(prev["linf"] / linf) / denom
        self.rows.append({
            "cells": cells, "l1": l1, "order_l1": order_l1,
            "linf": linf, "order_linf": order_linf,
            "ubar_min": ubar_min, "ubar_max": ubar_max,
        })

    def to_json_dict(self) -> dict:
        return {"rows": self.rows}

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("cells,l1,order_l1,linf,order_linf,ubar_min,ubar_max\n")
            for r in self.rows:
                cells = r["cells"] if np.isscalar(r["cells"]) else r["cells"][0]
                o1 = "" if r["order_l1"] is None else repr(float(r["order_l1"]))
                o2 = "" if r["order_linf"] is None else repr(float(r["order_linf"]))
                fh.write(f"{cells},{float(r['l1'])!r},{o1},{float(r['linf'])!r},{o2},"
                         f"{float(r['ubar_min'])!r},{float(r['ubar_max'])!r}\n")


def _thread_count(n_jobs: int) -> int:
    raw = os.environ.get("MPPDG_THREADS", "1")
    try:
        width = int(raw)
    except ValueError:
        width = 1
    if width == 0:
        width = os.cpu_count() or 1
    return max(1, min(width, n_jobs))


def write_solution_csv(path, field: DGField, config: RunConfig):
    """Cell centers and averages; '#' comment lines carry run metadata."""
    with open(path, "w") as fh:
        fh.write(f"# problem={config.problem} order={config.order} "
                 f"t_final={config.t_final!r} mpp={config.mpp}\n")
        if field.dim == 1:
            fh.write(f"# grid: n={field.grid.n}\n")
            fh.write("x_center,u_bar\n")
            avgs = field.cell_averages()
            for x, u in zip(field.grid.centers(), avgs):
                fh.write(f"{float(x)!r},{float(u)!r}\n")
        else:
            fh.write(f"# grid: nx={field.grid.nx} ny={field.grid.ny}\n")
            fh.write("x_center,y_center,u_bar\n")
            avgs = field.cell_averages()
            cx = field.grid.x.centers()
            cy = field.grid.y.centers()
            for j in range(field.grid.ny):
                for i in range(field.grid.nx):
                    fh.write(f"{float(cx[i])!r},{float(cy[j])!r},{float(avgs[i, j])!r}\n")


def run_single(config: RunConfig) -> dict:
    """Execute one run; returns the report dict and writes outputs if asked."""
    problem, grid, basis, controls, cfl = config.build()
    field = project_problem(problem, grid, basis)
    wall0 = time.perf_counter()
    final, stats = evolve(field, problem, config.t_final, controls, cfl)
    wall = time.perf_counter() - wall0
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "run",
        "config": config.to_json_dict(),
        "steps": stats.steps,
        "wall_time_s": wall,
        "ubar_min": stats.ubar_min,
        "ubar_max": stats.ubar_max,
        "limiter_activations": stats.limiter_activations,
        "theta_min": stats.theta_min,
    }
    if problem.exact is not None:
        l1, linf = exact_error(final, problem, config.t_final)
        report["l1_error"] = l1
        report["linf_error"] = linf
    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_solution_csv(out / "solution.csv", final, config)
        with open(out / "report.json", "w") as fh:
            json.dump(report, fh, indent=2)
    return report


def run_convergence(config: RunConfig, meshes) -> dict:
    """Run a mesh sequence concurrently and assemble the order table."""
    problem = get_problem(config.problem, **config.params)
    if problem.exact is None:
        raise ValueError(f"problem {config.problem!r} has no exact solution")

    def one(cells):
        cfg = RunConfig(**{**config.__dict__, "cells": cells, "out_dir": None})
        return run_single(cfg)

    with ThreadPoolExecutor(max_workers=_thread_count(len(meshes))) as pool:
        reports = list(pool.map(one, meshes))
    table = ConvergenceTable()
    for cells, rep in zip(meshes, reports):
        table.add(cells, rep["l1_error"], rep["linf_error"],
                  rep["ubar_min"], rep["ubar_max"])
    result = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "convergence",
        "config": config.to_json_dict(),
        "meshes": [list(m) if isinstance(m, tuple) else m for m in meshes],
        "table": table.to_json_dict(),
    }
    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        table.write_csv(out / "table.csv")
        with open(out / "report.json", "w") as fh:
            json.dump(result, fh, indent=2)
    return result


# --- bound-report suites (mesh/time/limiter settings of the reference runs) --

def _suite_specs():
    return {
        "porous-1d": dict(
            problem="porous-medium", order=3, t_final=2.0, tvb=1.0,
            variants=[{"params": {"m": m}} for m in (2, 3, 5, 8)],
            cells=[80]),
        "bl-1d": dict(
            problem="buckley-leverett-1d", t_final=0.2, tvb=10.0,
            variants=[{"order": k} for k in (1, 2, 3)],
            cells=[100]),
        "bl-2d": dict(
            problem="buckley-leverett-2d", order=2, t_final=0.5, tvb=50.0,
            variants=[{}], cells=[16, 32, 64, 128]),
        "rigid": dict(
            problem="rigid-rotation", order=2, t_final=0.1, tvb=50.0,
            variants=[{"params": {"re_inv": 0.01}}], cells=[8, 16, 32, 64, 128]),
        "swirl": dict(
            problem="swirling", order=2, t_final=0.1, tvb=50.0,
            variants=[{"params": {"re_inv": 0.01, "t_period": 0.1}}],
            cells=[8, 16, 32, 64, 128]),
        "vortex": dict(
            problem="vortex-patch", order=2, t_final=0.1, tvb=50.0,
            variants=[{}], cells=[8, 16, 32, 64]),
    }


def run_bounds_suite(name: str, cells=None, out_dir=None) -> dict:
    """DG vs MPPDG min/max pairs for one of the reference configurations."""
    specs = _suite_specs()
    if name not in specs:
        raise ValueError(f"unknown suite {name!r}; known: {sorted(specs)}")
    spec = specs[name]
    meshes = cells if cells is not None else spec["cells"]

    jobs = []
    for variant in spec["variants"]:
        for mesh in meshes:
            for mpp in (False, True):
                cfg = RunConfig(
                    problem=spec["problem"],
                    params=variant.get("params", {}),
                    order=variant.get("order", spec.get("order", 2)),
                    cells=mesh, t_final=spec["t_final"], tvb=spec["tvb"],
                    mpp=mpp)
                jobs.append(cfg)
    with ThreadPoolExecutor(max_workers=_thread_count(len(jobs))) as pool:
        reports = list(pool.map(run_single, jobs))

    rows = []
    for cfg, rep in zip(jobs, reports):
        rows.append({
            "problem": cfg.problem, "params": cfg.params, "order": cfg.order,
            "cells": cfg.cells, "scheme": "MPPDG" if cfg.mpp else "DG",
            "ubar_min": rep["ubar_min"], "ubar_max": rep["ubar_max"],
            "steps": rep["steps"],
        })
    result = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "bounds",
        "suite": name,
        "rows": rows,
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"bounds_{name}.json", "w") as fh:
            json.dump(result, fh, indent=2)
    return result
