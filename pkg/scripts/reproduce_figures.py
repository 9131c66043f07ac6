"""Regenerate the mass-curve figures for the reference parameter sets.

    python3 scripts/reproduce_figures.py [--out-dir figures]

Writes one CSV + SVG per set through the ``curve`` command, plus fold.svg:
the cubic v -> a v^3 + b v^2 + c v for (1, -7/2, 3), whose loss of
monotonicity is why that set is rejected.
"""
import argparse
import math
from pathlib import Path

import numpy as np

from algnls import cli
from algnls.output import new_figure, save_svg

SETS = {
    "monotone": ("1", "-2", "3", ["--omega-max", "3"]),
    "degenerate": ("2", "-2", "1", []),
    "window": ("1", repr(-math.sqrt(33) / 2), "3", []),
}


def fold_figure(path: Path) -> None:
    a, b, c = 1.0, -3.5, 3.0
    v = np.linspace(0.0, 2.6, 400)
    fig, ax = new_figure()
    ax.plot(v, ((a * v + b) * v + c) * v, color="black")
    ax.set_xlabel("v")
    ax.set_ylabel("a v³ + b v² + c v")
    ax.set_title(f"a = 1, b = -7/2, c = 3, σ = {b * b / (a * c):.6g}")
    save_svg(fig, path)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out-dir", type=Path, default=Path("figures"))
    args = parser.parse_args()
    for name, (a, b, c, extra) in SETS.items():
        code = cli.main(["curve", "--a", a, "--b", b, "--c", c, "--name", name,
                         "--out-dir", str(args.out_dir), *extra])
        print(f"{name:10s} exit {code}")
    fold_figure(args.out_dir / "fold.svg")
    code = cli.main(["curve", "--a", "1", "--b", "-3.5", "--c", "3", "--out-dir", str(args.out_dir)])
    print(f"{'fold':10s} exit {code} (expected 2)")


if __name__ == "__main__":
    main()
