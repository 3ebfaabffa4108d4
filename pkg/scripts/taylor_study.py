#!/usr/bin/env python3
"""Convergence study: atomistic energy vs second-order prediction.

For each requested mode (smooth, one-jump, microtwin) this sweeps the
matched epsilon sequence, prints the residual normalized by eps^2 per step,
and fits the decay order of the residual itself. A clean second-order
expansion shows the normalized residual shrinking roughly geometrically and
a fitted order near 3 (smooth/one-jump energies) or near 3 for the
microtwin energy difference.

Usage:
    python3 scripts/taylor_study.py [--modes smooth,one-jump,microtwin]
                                    [--n 312,625,1250,2500,5000] [--sigma S]
"""

import argparse
import math
import sys

import numpy as np

from microtwin import (
    DiscreteProfile,
    LennardJones,
    MicrotwinConfig,
    PiecewiseDeformation,
    atomistic_energy,
    energy_difference,
    k_terms,
    lattice_window,
    make_epsilon_sequence,
    microtwin_lattice,
    one_jump_coefficients,
    sample_to_lattice,
    smooth_coefficients,
    symmetric_params,
)


def residuals(mode: str, pot, eps_list, a1: float, a2: float):
    params = symmetric_params(a1, a2)
    u_jump = PiecewiseDeformation(breakpoints=(-1.0, 0.0, 1.0),
                                  pieces=((0.0, 1.0, 0.05), (0.0, 1.2, 0.03)))
    rows = []
    if mode == "smooth":
        u = PiecewiseDeformation.single(-1.0, 1.0, (0.0, 1.0, 0.05))
        co = smooth_coefficients(u, pot, params, -1.0, 1.0, tol=1e-13)
        for eps in eps_list:
            cfg = sample_to_lattice(u, lattice_window(-1.0, 1.0, 0.0, eps))
            rows.append((eps, abs(atomistic_energy(cfg, pot)
                                  - co.predicted(eps))))
    elif mode == "one-jump":
        co = one_jump_coefficients(u_jump, pot, params, tol=1e-13)
        for eps in eps_list:
            cfg = sample_to_lattice(u_jump,
                                    lattice_window(-1.0, 1.0, 0.0, eps))
            rows.append((eps, abs(atomistic_energy(cfg, pot)
                                  - co.predicted(eps))))
    elif mode == "microtwin":
        prof = DiscreteProfile(m=3, values=(0.3, 0.7))
        k1, k2 = k_terms(MicrotwinConfig(u=u_jump, profile=prof,
                                         eps=eps_list[0]), pot, a1, tol=1e-13)
        for eps in eps_list:
            base = sample_to_lattice(u_jump,
                                     lattice_window(-1.0, 1.0, 0.0, eps))
            twin = microtwin_lattice(MicrotwinConfig(u=u_jump, profile=prof,
                                                     eps=eps))
            diff = energy_difference(twin, base, pot)
            rows.append((eps, abs(diff - (eps * k1 + eps * eps * k2))))
    else:
        raise SystemExit(f"unknown mode {mode!r}")
    return rows


def fitted_order(rows) -> float:
    xs = np.log([r[0] for r in rows])
    ys = np.log([max(r[1], 1e-300) for r in rows])
    return float(np.polyfit(xs, ys, 1)[0])


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", default="smooth,one-jump,microtwin")
    ap.add_argument("--n", default="312,625,1250,2500,5000",
                    help="indices into the matched epsilon sequence")
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--a1", type=float, default=0.5)
    ap.add_argument("--a2", type=float, default=0.0)
    args = ap.parse_args(argv)

    pot = LennardJones(args.sigma)
    n_list = sorted(int(s) for s in args.n.split(","))
    seq = make_epsilon_sequence(args.a1, args.a2, max(n_list))
    eps_list = [seq[n - 1] for n in n_list]

    for mode in args.modes.split(","):
        rows = residuals(mode.strip(), pot, eps_list, args.a1, args.a2)
        print(f"\n== {mode.strip()} ==")
        print(f"{'eps':>14} {'residual':>14} {'residual/eps^2':>16}")
        for eps, res in rows:
            print(f"{eps:14.6e} {res:14.6e} {res / eps**2:16.6e}")
        print(f"fitted decay order of the residual: "
              f"{fitted_order(rows):.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
