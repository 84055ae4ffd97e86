#!/usr/bin/env python3
"""Generate the CSV inputs for the figure renderer (frontend/).

fig2   1D advection profile (N=200, P2) with an exact-solution overlay
fig7   rotation / swirling solutions on a 64^2 grid, for cut-line plots
fig9   vortex patch on a 64^2 grid, for contour plots

Times default to desk scale; pass --full for the reference horizons.
"""
import argparse
from pathlib import Path

import numpy as np

from mppdg.harness import RunConfig, run_single
from mppdg.problems import get_problem


def dump_exact_1d(path, problem, t, n=2000):
    a, b = problem.domain
    x = np.linspace(a, b, n)
    u = problem.exact(x, t)
    with open(path, "w") as fh:
        fh.write(f"# exact solution of {problem.name} at t={t!r}\n")
        fh.write("x_center,u_bar\n")
        for xi, ui in zip(x, u):
            fh.write(f"{float(xi)!r},{float(ui)!r}\n")


def fig2(out: Path, t_final: float):
    p = get_problem("jiangshu-advection")
    for label, tvb in (("tvb", 10.0), ("notvb", 0.0)):
        cfg = RunConfig(problem="jiangshu-advection", order=2, cells=200,
                        t_final=t_final, mpp=True, tvb=tvb,
                        out_dir=str(out / f"fig2_{label}"))
        rep = run_single(cfg)
        print(f"fig2 {label}: min={rep['ubar_min']:+.13f} max={rep['ubar_max']:.13f}")
    dump_exact_1d(out / "fig2_exact.csv", p, t_final)


def fig7(out: Path, t_final: float):
    for name, params in (("rigid-rotation", {"re_inv": 0.0}),
                         ("swirling", {"re_inv": 0.0, "t_period": t_final})):
        for mpp in (True, False):
            tag = "mppdg" if mpp else "dg"
            cfg = RunConfig(problem=name, params=params, order=2, cells=64,
                            t_final=t_final, mpp=mpp, tvb=0.0,
                            out_dir=str(out / f"fig7_{name}_{tag}"))
            rep = run_single(cfg)
            print(f"fig7 {name} {tag}: min={rep['ubar_min']:+.10f} "
                  f"max={rep['ubar_max']:.10f}")


def fig9(out: Path, t_final: float):
    cfg = RunConfig(problem="vortex-patch", order=2, cells=64,
                    t_final=t_final, mpp=True, tvb=50.0,
                    out_dir=str(out / "fig9_vortex"))
    rep = run_single(cfg)
    print(f"fig9 vortex: min={rep['ubar_min']:+.10f} max={rep['ubar_max']:.10f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("figures", nargs="*", default=["fig2", "fig7", "fig9"])
    ap.add_argument("--out", default="results/figures")
    ap.add_argument("--full", action="store_true",
                    help="reference horizons (T=8 / 2*pi / 5) instead of desk scale")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if "fig2" in args.figures:
        fig2(out, 8.0 if args.full else 2.0)
    if "fig7" in args.figures:
        fig7(out, 2 * np.pi if args.full else 0.5)
    if "fig9" in args.figures:
        fig9(out, 5.0 if args.full else 0.5)


if __name__ == "__main__":
    main()
