"""Command-line front end.

    algnls curve    --a 1 --b -2 --c 3 --omega-max 3
    algnls classify --a 1 --b -2 --c 3 --lambda 3.8666667
    algnls evolve   --a 1 --b -2 --c 3 --omega 1 --eps 1e-3 --T 50

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 numerical abort.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classifier, evolution, profile, spectrum_curve
from .nonlinearity import CubicParams, ParameterError, eval_G, eval_V, validate_params
from .output import default_output_dir, new_figure, save_svg, write_csv

log = logging.getLogger("algnls")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4
COMMANDS = ("eval", "profile", "curve", "classify", "lambda2", "hessian", "evolve")


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: CubicParams
    options: dict = field(default_factory=dict)
    seed: int = 0
    out_dir: Path = field(default_factory=default_output_dir)

    def path(self, suffix: str) -> Path:
        stem = self.options.get("name") or self.command
        return self.out_dir / f"{stem}.{suffix}"


# argument parsing --------------------------------------------------------

def _positive(name):
    def conv(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not (math.isfinite(value) and value > 0):
            raise argparse.ArgumentTypeError(f"{name} must be a positive finite number, got {text!r}")
        return value

    return conv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="algnls", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, required=True)
    common.add_argument("--b", type=float, required=True)
    common.add_argument("--c", type=float, required=True)
    common.add_argument("--out-dir", type=Path, default=None,
                        help="output directory (default: $ALGNLS_OUTPUT_DIR or .)")
    common.add_argument("--name", default=None, help="output file stem (default: command name)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("eval", parents=[common], help="tabulate V, G and derivatives")
    p.add_argument("--s-max", type=_positive("--s-max"), default=10.0)
    p.add_argument("--points", type=int, default=201)

    p = sub.add_parser("profile", parents=[common], help="sample the soliton profile R_omega")
    p.add_argument("--omega", type=_positive("--omega"), required=True)
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--L", type=_positive("--L"), default=None)

    p = sub.add_parser("curve", parents=[common], help="mass curve lambda(omega) with critical points")
    p.add_argument("--omega-min", type=_positive("--omega-min"), default=None)
    p.add_argument("--omega-max", type=_positive("--omega-max"), default=None)
    p.add_argument("--points", type=int, default=400)

    p = sub.add_parser("classify", parents=[common], help="minimizer count at a mass level")
    p.add_argument("--lambda", dest="level", type=_positive("--lambda"), required=True)

    sub.add_parser("lambda2", parents=[common], help="equal-area level lambda_2")

    p = sub.add_parser("hessian", parents=[common], help="constrained L+ kernel check")
    p.add_argument("--omega", type=_positive("--omega"), required=True)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--L", type=_positive("--L"), default=None)

    p = sub.add_parser("evolve", parents=[common], help="orbital stability probe")
    p.add_argument("--omega", type=_positive("--omega"), required=True)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--T", type=_positive("--T"), default=50.0)
    p.add_argument("--dt", type=_positive("--dt"), default=1e-3)
    p.add_argument("--mode", choices=evolution.PERTURBATION_MODES, default="even")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=_positive("--L"), default=None)
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    params = validate_params(args.a, args.b, args.c)
    options = {k: v for k, v in vars(args).items()
               if k not in {"a", "b", "c", "command", "out_dir", "seed", "verbose"}}
    for key in ("points", "samples"):
        if key in options and options[key] < 2:
            raise ValidationError(f"--{key} must be at least 2")
    if options.get("n") is not None and options["n"] < 64:
        raise ValidationError("--n must be at least 64")
    if "eps" in options and not 0.0 <= options["eps"] <= 0.1:
        raise ValidationError("--eps must lie in [0, 0.1]")
    if "T" in options and options["T"] > 100:
        raise ValidationError("--T must not exceed 100")
    lo, hi = options.get("omega_min"), options.get("omega_max")
    if lo is not None and hi is not None and lo >= hi:
        raise ValidationError("--omega-min must be below --omega-max")
    out_dir = args.out_dir if args.out_dir is not None else default_output_dir()
    return RunConfig(args.command, params, options, args.seed, out_dir)


# commands ----------------------------------------------------------------

def cmd_eval(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    s = np.linspace(0.0, cfg.options["s_max"], cfg.options["points"])
    v, v1, v2 = eval_V(p, s)
    g0, g1, g2 = eval_G(p, s)
    rows = zip(s, v, v1, v2, g0, g1, g2)
    return [write_csv(cfg.path("csv"), p, ["s", "V", "V1", "V2", "G", "G1", "G2"], rows)]


def cmd_profile(cfg: RunConfig) -> list[Path]:
    p, o = cfg.params, cfg.options
    prof = profile.sample_profile(p, o["omega"], o["n"], o["L"])
    log.info("omega=%g crest=%.17g mass=%.17g energy=%.17g", prof.omega, prof.crest, prof.mass, prof.energy)
    return [write_csv(cfg.path("csv"), p, ["x", "R"], zip(prof.xs, prof.rs))]


def _curve_range(curve: spectrum_curve.LambdaCurve, o: dict) -> tuple[float, float]:
    hi = o.get("omega_max")
    if hi is None:
        hi = 1.6 * max(curve.critical_omegas) if curve.critical_omegas else 3.0
    lo = o.get("omega_min") or hi / (10.0 * o["points"])
    return lo, hi


def cmd_curve(cfg: RunConfig) -> list[Path]:
    p, o = cfg.params, cfg.options
    curve = spectrum_curve.critical_frequencies(p)
    lo, hi = _curve_range(curve, o)
    w = np.linspace(lo, hi, o["points"])
    lam = spectrum_curve.lambda_closed(p, w)
    rows = zip(w, lam, spectrum_curve.lambda_prime(p, w), spectrum_curve.energy_closed(p, w))
    csv_path = write_csv(cfg.path("csv"), p, ["omega", "lambda", "lambda_prime", "energy"], rows)

    fig, ax = new_figure()
    ax.plot(w, lam, color="black", lw=1.5, label="λ(ω)")
    if curve.has_window:
        lam2 = classifier.find_lambda2(p)
        w1, w2, w3 = classifier.window_roots(p, lam2)
        seg = np.linspace(w1, w2, 200)
        ax.fill_between(seg, lam2, spectrum_curve.lambda_closed(p, seg), color="0.7", label="g₁(λ₂)")
        seg = np.linspace(w2, w3, 200)
        ax.fill_between(seg, spectrum_curve.lambda_closed(p, seg), lam2, color="0.85", label="g₂(λ₂)")
        ax.axhline(lam2, color="0.4", lw=0.8, ls=":")
        for name, wc, lc in (("ω_m", curve.omega_m, curve.lambda_M), ("ω_M", curve.omega_M, curve.lambda_m)):
            ax.plot([wc], [lc], "o", color="tab:red")
            ax.annotate(name, (wc, lc), textcoords="offset points", xytext=(4, 6))
    if curve.omega_d is not None:
        ax.plot([curve.omega_d], [curve.lambda_d], "o", color="tab:red")
        ax.annotate("ω_d", (curve.omega_d, curve.lambda_d), textcoords="offset points", xytext=(4, -14))
    a, b, c = p.as_tuple()
    ax.set_title(f"a = {a:g}, b = {b:.6g}, c = {c:g}, σ = {p.sigma:.6g}")
    ax.set_xlabel("ω")
    ax.set_ylabel("λ(ω)")
    ax.legend(loc="upper left", frameon=False)
    return [csv_path, save_svg(fig, cfg.path("svg"))]


def format_report(rep: classifier.ClassificationReport) -> str:
    p = rep.params
    lines = [
        f"parameters      a = {p.a:g}, b = {p.b:.17g}, c = {p.c:g}",
        f"sigma           {p.sigma:.17g}",
        f"regime          {rep.regime}",
        f"mass level      {rep.level:.17g}",
    ]
    for (idx, w), e, s, d in zip(rep.branch_freqs, rep.energies, rep.slopes, rep.degenerate):
        lines.append(
            f"branch {idx}        omega = {w:.17g}  e = {e:.17g}  lambda' = {s:.6g}"
            + ("  [degenerate]" if d else "")
        )
    if rep.areas is not None:
        lines.append(f"areas           g1 = {rep.areas[0]:.17g}, g2 = {rep.areas[1]:.17g}")
    if rep.lambda2 is not None:
        lines.append(f"lambda_2        {rep.lambda2:.17g} (distance {rep.distance_to_lambda2:+.3g})")
    lines.append(f"|K_lambda|      {rep.minimizer_count}")
    lines.append("minimizers      " + ", ".join(f"branch {b}" for b in rep.minimizing_branches))
    lines.append(f"degenerate min  {'yes' if rep.degenerate_minimum else 'no'}")
    return "\n".join(lines) + "\n"


def cmd_classify(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    rep = classifier.classify(p, cfg.options["level"])
    text = format_report(rep)
    sys.stdout.write(text)
    txt_path = cfg.path("txt")
    txt_path.parent.mkdir(parents=True, exist_ok=True)
    txt_path.write_text(text, encoding="utf-8")
    header = ["sigma", "regime", "lambda", "omegas", "g1", "g2", "lambda2",
              "minimizer_count", "minimizing_branches", "degenerate"]
    row = [
        p.sigma,
        str(rep.regime),
        rep.level,
        ";".join(format(w, ".17g") for w in rep.frequencies),
        rep.areas[0] if rep.areas else "",
        rep.areas[1] if rep.areas else "",
        rep.lambda2 if rep.lambda2 is not None else "",
        rep.minimizer_count,
        ";".join(str(b) for b in rep.minimizing_branches),
        ";".join("true" if d else "false" for d in rep.degenerate),
    ]
    return [txt_path, write_csv(cfg.path("csv"), p, header, [row])]


def cmd_lambda2(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    curve = spectrum_curve.critical_frequencies(p)
    lam2 = classifier.find_lambda2(p)
    w1, w2, w3 = classifier.window_roots(p, lam2)
    g1, g2 = classifier.equal_area_functions(p, lam2)
    sys.stdout.write(f"{lam2:.17g}\n")
    header = ["lambda_m", "lambda_M", "lambda2", "omega1", "omega2", "omega3", "g1", "g2"]
    return [write_csv(cfg.path("csv"), p, header, [[curve.lambda_m, curve.lambda_M, lam2, w1, w2, w3, g1, g2]])]


def cmd_hessian(cfg: RunConfig) -> list[Path]:
    p, o = cfg.params, cfg.options
    chk = classifier.lplus_kernel_check(p, o["omega"], o["n"], o["L"])
    slope = spectrum_curve.lambda_prime(p, o["omega"])
    sys.stdout.write(f"{chk.verdict} sigma_min={chk.smallest_constrained_singular_value:.6g} "
                     f"ratio={chk.refinement_ratio:.4f} lambda'={slope:.6g}\n")
    header = ["omega", "n_coarse", "n_fine", "L", "sigma_min_coarse", "sigma_min_fine",
              "ratio", "lowest_eigenvalue", "lambda_prime", "verdict"]
    row = [chk.omega, o["n"], chk.n, chk.L, chk.coarse_singular_value,
           chk.smallest_constrained_singular_value, chk.refinement_ratio, chk.lowest_eigenvalue, slope, chk.verdict]
    return [write_csv(cfg.path("csv"), p, header, [row])]


def cmd_evolve(cfg: RunConfig) -> list[Path]:
    p, o = cfg.params, cfg.options
    series = evolution.stability_experiment(
        p, o["omega"], o["eps"], o["T"], mode=o["mode"], dt=o["dt"], samples=o["samples"],
        n=o["n"], L=o["L"], seed=cfg.seed,
    )
    rows = zip(series.times, series.mass_drift, series.energy_drift, series.distances)
    csv_path = write_csv(cfg.path("csv"), p, ["t", "mass_drift", "energy_drift", "orbit_distance"], rows)
    sys.stdout.write(
        f"max orbit distance {series.max_distance:.6g} "
        f"(perturbation {series.perturbation_size:.6g}, ||R||_H1 {series.profile_h1:.6g})\n"
    )
    fig, ax = new_figure()
    ax.plot(series.times, series.distances, color="black", lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("d(φ(t), orbit of R_ω)")
    ax.set_title(f"ω = {series.omega:g}, ε = {series.eps:g}, mode = {series.mode}, σ = {p.sigma:.6g}")
    return [csv_path, save_svg(fig, cfg.path("svg"))]


DISPATCH = {
    "eval": cmd_eval,
    "profile": cmd_profile,
    "curve": cmd_curve,
    "classify": cmd_classify,
    "lambda2": cmd_lambda2,
    "hessian": cmd_hessian,
    "evolve": cmd_evolve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags and 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
    except (ParameterError, ValidationError) as exc:
        print(f"algnls: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        paths = DISPATCH[cfg.command](cfg)
    except (ParameterError, ValidationError, profile.DomainError) as exc:
        print(f"algnls: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"algnls: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except evolution.BlowUpError as exc:
        print(f"algnls: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # remaining ValueErrors come from precondition checks (e.g. lambda2 outside the window)
        print(f"algnls: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
