#!/usr/bin/env python3
"""Regenerate the two reference tables.

Writes critical_slopes.csv (critical interface slope per twin count, with
the m = 2 closed form for comparison) and interface_coefficients.csv
(sigma-scaled second-order interface coefficient per twin count, optimal
count marked). Thin wrapper over the microtwin CLI so the output format
stays identical to `microtwin am-table` / `microtwin g-table`.

Usage:
    python3 scripts/make_tables.py [--outdir DIR] [--sigma S] [--workers N]
"""

import argparse
import pathlib
import sys

from microtwin.cli import main as cli_main


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="tables", help="output directory")
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    common = ["--sigma", str(args.sigma), "--workers", str(args.workers)]

    rc = cli_main(["am-table", *common,
                   "--out", str(outdir / "critical_slopes.csv")])
    if rc != 0:
        return rc
    rc = cli_main(["g-table", *common,
                   "--out", str(outdir / "interface_coefficients.csv")])
    if rc != 0:
        return rc
    print(f"wrote {outdir / 'critical_slopes.csv'} and "
          f"{outdir / 'interface_coefficients.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
