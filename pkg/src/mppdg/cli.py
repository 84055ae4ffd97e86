"""Command-line front end: run / converge / bounds / list-problems."""
from __future__ import annotations

import argparse
import json
import sys

from .harness import RunConfig, run_bounds_suite, run_convergence, run_single
from .problems import list_problems


def _parse_params(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise SystemExit(f"--param expects key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def _load_config_file(path) -> dict:
    """key=value lines; '#' comments and blank lines ignored."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--problem", help="problem name (see list-problems)")
    p.add_argument("--param", action="append", metavar="KEY=VAL",
                   help="problem parameter, repeatable")
    p.add_argument("--order", type=int, help="polynomial degree k")
    p.add_argument("--cells", help="cell count: N or NX,NY")
    p.add_argument("--tfinal", type=float, help="final time")
    p.add_argument("--cflc", type=float, help="convective CFL number")
    p.add_argument("--cfld", type=float, help="diffusive CFL number")
    p.add_argument("--mpp", choices=("on", "off"), help="bound-preserving flux limiter")
    p.add_argument("--tvb", help="TVB constant M, or 'off'")
    p.add_argument("--flux-form", choices=("standard", "printed"),
                   help="diffusive interface flux parenthesization")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="key=value config file; flags override it")


def _parse_cells(text):
    if text is None:
        return None
    if "," in text:
        nx, ny = text.split(",", 1)
        return (int(nx), int(ny))
    return int(text)


def _build_run_config(args) -> RunConfig:
    merged = {}
    if args.config:
        merged.update(_load_config_file(args.config))

    def pick(flag, key, cast=lambda v: v):
        if flag is not None:
            return flag
        if key in merged:
            return cast(merged[key])
        return None

    problem = pick(args.problem, "problem")
    if not problem:
        raise SystemExit("a problem name is required (--problem or config file)")
    params = _parse_params(args.param)
    if "params" in merged and not params:
        params = json.loads(merged["params"])
    cfg = RunConfig(problem=problem, params=params)
    order = pick(args.order, "order", int)
    if order is not None:
        cfg.order = order
    cells = pick(_parse_cells(args.cells), "cells", _parse_cells)
    if cells is not None:
        cfg.cells = cells
    tfinal = pick(args.tfinal, "tfinal", float)
    if tfinal is not None:
        cfg.t_final = tfinal
    cfg.cflc = pick(args.cflc, "cflc", float)
    cfg.cfld = pick(args.cfld, "cfld", float)
    mpp = pick(args.mpp, "mpp")
    if mpp is not None:
        cfg.mpp = mpp == "on"
    tvb = pick(args.tvb, "tvb")
    if tvb is not None:
        cfg.tvb = 0.0 if tvb == "off" else float(tvb)
    form = pick(args.flux_form, "flux_form")
    if form is not None:
        cfg.flux_form = form
    cfg.out_dir = pick(args.out, "out")
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mppdg",
        description="Bound-preserving DG solver for scalar convection-diffusion")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation")
    _add_run_flags(p_run)

    p_conv = sub.add_parser("converge", help="convergence sweep over meshes")
    _add_run_flags(p_conv)
    p_conv.add_argument("--meshes", required=True,
                        help="comma-separated cell counts, e.g. 16,32,64")

    p_bounds = sub.add_parser("bounds", help="DG vs MPPDG bound report")
    p_bounds.add_argument("--suite", required=True,
                          choices=("porous-1d", "bl-1d", "bl-2d", "rigid",
                                   "swirl", "vortex"))
    p_bounds.add_argument("--cells", help="override mesh list, e.g. 16,32")
    p_bounds.add_argument("--out", help="output directory")

    sub.add_parser("list-problems", help="print registered problem names")

    args = parser.parse_args(argv)
    if args.command == "list-problems":
        for name in list_problems():
            print(name)
        return 0
    if args.command == "run":
        report = run_single(_build_run_config(args))
        json.dump(report, sys.stdout, indent=2)
        print()
        return 0
    if args.command == "converge":
        cfg = _build_run_config(args)
        meshes = [int(m) for m in args.meshes.split(",")]
        report = run_convergence(cfg, meshes)
        json.dump(report, sys.stdout, indent=2)
        print()
        return 0
    if args.command == "bounds":
        cells = [int(c) for c in args.cells.split(",")] if args.cells else None
        report = run_bounds_suite(args.suite, cells=cells, out_dir=args.out)
        json.dump(report, sys.stdout, indent=2)
        print()
        return 0
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
