"""CSV and SVG writers shared by the command-line tools."""
from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .nonlinearity import CubicParams

OUTDIR_ENV = "ALGNLS_OUTPUT_DIR"


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    try:
        return format(float(value), ".17g")
    except (TypeError, ValueError):
        return str(value)


def provenance(p: CubicParams) -> str:
    return (
        f"# a={fmt(p.a)} b={fmt(p.b)} c={fmt(p.c)} sigma={fmt(p.sigma)} "
        f"tool=algnls version={__version__}"
    )


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTDIR_ENV, "."))


def write_csv(path: Path, p: CubicParams, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Comment line, header row, then data rows; RFC 4180 quoting and CRLF line ends."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(provenance(p) + "\r\n")
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def new_figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "algnls"
    matplotlib.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    return fig, ax


def save_svg(fig, path: Path) -> Path:
    import matplotlib.pyplot as plt

    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
