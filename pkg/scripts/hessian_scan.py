"""Constrained-Hessian singular value along the mass curve.

    python3 scripts/hessian_scan.py --a 2 --b -2 --c 1 --omega-min 0.05 --omega-max 1

Tabulates sigma_min of the even-sector L+ projected off R next to lambda'(omega);
the two should vanish together.
"""
import argparse
from pathlib import Path

import numpy as np

from algnls.classifier import lplus_kernel_check
from algnls.nonlinearity import validate_params
from algnls.output import new_figure, save_svg, write_csv
from algnls.spectrum_curve import critical_frequencies, lambda_prime


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--a", type=float, default=2.0)
    parser.add_argument("--b", type=float, default=-2.0)
    parser.add_argument("--c", type=float, default=1.0)
    parser.add_argument("--omega-min", type=float, default=0.05)
    parser.add_argument("--omega-max", type=float, default=1.0)
    parser.add_argument("--points", type=int, default=20)
    parser.add_argument("--n", type=int, default=2048)
    parser.add_argument("--out-dir", type=Path, default=Path("hessian_scan"))
    args = parser.parse_args()

    p = validate_params(args.a, args.b, args.c)
    omegas = np.linspace(args.omega_min, args.omega_max, args.points)
    omegas = np.unique(np.concatenate([omegas, critical_frequencies(p).critical_omegas]))
    rows = []
    for w in omegas:
        chk = lplus_kernel_check(p, w, n=args.n)
        rows.append([w, lambda_prime(p, w), chk.smallest_constrained_singular_value, chk.refinement_ratio,
                     chk.verdict])
        print(f"omega={w:.6f} lambda'={rows[-1][1]: .3e} sigma_min={rows[-1][2]:.3e} {chk.verdict}")
    write_csv(args.out_dir / "scan.csv", p, ["omega", "lambda_prime", "sigma_min", "ratio", "verdict"], rows)

    fig, ax = new_figure()
    ax.semilogy(omegas, [r[2] for r in rows], "o-", color="black", label="σ_min")
    ax.semilogy(omegas, np.abs([r[1] for r in rows]), "--", color="tab:red", label="|λ′(ω)|")
    ax.set_xlabel("ω")
    ax.legend(frameon=False)
    save_svg(fig, args.out_dir / "scan.svg")


if __name__ == "__main__":
    main()
