#!/usr/bin/env python3
"""Run the DG-vs-MPPDG bound report suites and print min/max side by side."""
import argparse

from mppdg.harness import run_bounds_suite

SUITES = ("porous-1d", "bl-1d", "bl-2d", "rigid", "swirl", "vortex")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("suites", nargs="*", default=list(SUITES),
                    help=f"subset of {SUITES}")
    ap.add_argument("--out", default="results/bounds")
    ap.add_argument("--cells", help="override mesh list, e.g. 16,32")
    args = ap.parse_args()
    cells = [int(c) for c in args.cells.split(",")] if args.cells else None

    for name in args.suites:
        report = run_bounds_suite(name, cells=cells, out_dir=args.out)
        print(f"== {name}")
        by_case = {}
        for row in report["rows"]:
            key = (str(row["params"]), row["order"], str(row["cells"]))
            by_case.setdefault(key, {})[row["scheme"]] = row
        for key, pair in sorted(by_case.items()):
            dg, mpp = pair["DG"], pair["MPPDG"]
            print(f"  {key}: DG [{dg['ubar_min']:+.13f}, {dg['ubar_max']:.13f}]"
                  f"  MPPDG [{mpp['ubar_min']:+.13f}, {mpp['ubar_max']:.13f}]")


if __name__ == "__main__":
    main()
