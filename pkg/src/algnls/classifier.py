"""Minimizer counting and degeneracy classification for a fixed mass level.

For a level lam the candidate minimizers are the profiles R_w with
lambda(w) = lam. In the multiplicity window there are up to three of them,
w1 < w2 < w3, and their energies are compared through the equal-area
functions

    g1(lam) = int_{w1}^{w2} (lambda(w) - lam) dw,
    g2(lam) = int_{w2}^{w3} (lam - lambda(w)) dw,

since e(w3) - e(w1) = (g1 - g2)/2, e(w2) - e(w1) = g1/2, e(w3) - e(w2) = -g2/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import linalg, optimize

from .nonlinearity import CubicParams, eval_G
from .profile import Profile, default_half_width, sample_profile
from .spectrum_curve import (
    LambdaCurve,
    Regime,
    critical_frequencies,
    energy_closed,
    lambda_antiderivative,
    lambda_closed,
    lambda_prime,
)

LEVEL_SNAP = 1e-12          # |lam - critical level| below this (relative) snaps to the critical root
LAMBDA2_MATCH = 1e-9        # relative distance to lambda_2 counted as "at lambda_2"
DEGENERACY_SLOPE = 1e-10    # |lambda'(w)| below this marks a degenerate branch
HESSIAN_FLOOR = 1e-4
HESSIAN_RATIO = 0.6


def _solve_level(p: CubicParams, lam: float, lo: float, hi: float) -> float:
    return optimize.brentq(lambda w: lambda_closed(p, w) - lam, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def _upper_bracket(p: CubicParams, lam: float, start: float) -> float:
    hi = max(1.0, 2.0 * start)
    while lambda_closed(p, hi) <= lam:
        hi *= 2.0
    return hi


def _near(x: float, y: float, rel: float) -> bool:
    return abs(x - y) <= rel * max(1.0, abs(y))


def branch_frequencies(p: CubicParams, lam: float) -> list[tuple[int, float]]:
    """All (branch index, w) with lambda(w) = lam, ordered by w.

    Indices follow the window localization: 1 on (0, w_m), 2 on (w_m, w_M),
    3 on (w_M, inf). Outside the window regime the single root has index 1.
    At lam = lambda_M (resp. lambda_m) the merged critical root is reported as
    branch 2 together with branch 3 (resp. 1).
    """
    if not lam > 0:
        raise ValueError(f"mass level must be positive, got {lam!r}")
    curve = critical_frequencies(p)
    if curve.regime is Regime.MULTIPLICITY_WINDOW:
        wm, wM = curve.omega_m, curve.omega_M
        if _near(lam, curve.lambda_M, LEVEL_SNAP):
            return [(2, wm), (3, _solve_level(p, lam, wM, _upper_bracket(p, lam, wM)))]
        if _near(lam, curve.lambda_m, LEVEL_SNAP):
            return [(1, _solve_level(p, lam, 0.0, wm)), (2, wM)]
        if lam > curve.lambda_M:
            return [(3, _solve_level(p, lam, wM, _upper_bracket(p, lam, wM)))]
        if lam < curve.lambda_m:
            return [(1, _solve_level(p, lam, 0.0, wm))]
        return [
            (1, _solve_level(p, lam, 0.0, wm)),
            (2, _solve_level(p, lam, wm, wM)),
            (3, _solve_level(p, lam, wM, _upper_bracket(p, lam, wM))),
        ]
    if curve.regime is Regime.UNIQUE_DEGENERATE_LEVEL and _near(lam, curve.lambda_d, LEVEL_SNAP):
        return [(1, curve.omega_d)]
    return [(1, _solve_level(p, lam, 0.0, _upper_bracket(p, lam, 1.0)))]


def _window(p: CubicParams) -> LambdaCurve:
    curve = critical_frequencies(p)
    if curve.regime is not Regime.MULTIPLICITY_WINDOW:
        raise ValueError(f"no multiplicity window: σ = {p.sigma:.6g}, b = {p.b:g} (need 2 < σ < 3, b < 0)")
    return curve


def window_roots(p: CubicParams, lam: float) -> tuple[float, float, float]:
    """(w1, w2, w3) for lam in [lambda_m, lambda_M], merged roots repeated."""
    curve = _window(p)
    tol = LEVEL_SNAP * max(1.0, lam)
    if not curve.lambda_m - tol <= lam <= curve.lambda_M + tol:
        raise ValueError(
            f"level {lam!r} outside the window [{curve.lambda_m!r}, {curve.lambda_M!r}]"
        )
    roots = dict(branch_frequencies(p, lam))
    if len(roots) == 3:
        return roots[1], roots[2], roots[3]
    if 1 in roots:
        return roots[1], roots[2], roots[2]
    return roots[2], roots[2], roots[3]


def _areas(p: CubicParams, w1: float, w2: float, w3: float, lam: float) -> tuple[float, float]:
    big = lambda_antiderivative(p, np.array([w1, w2, w3]))
    g1 = (big[1] - big[0]) - lam * (w2 - w1)
    g2 = lam * (w3 - w2) - (big[2] - big[1])
    return float(g1), float(g2)


def equal_area_functions(p: CubicParams, lam: float) -> tuple[float, float]:
    """(g1, g2) at lam from the exact antiderivative of lambda(w)."""
    w1, w2, w3 = window_roots(p, lam)
    g1, g2 = _areas(p, w1, w2, w3, lam)
    return max(g1, 0.0), max(g2, 0.0)


@lru_cache(maxsize=64)
def find_lambda2(p: CubicParams) -> float:
    """The unique level in (lambda_m, lambda_M) where g1 = g2."""
    curve = _window(p)

    def diff(lam):
        g1, g2 = _areas(p, *window_roots(p, lam), lam)
        return g2 - g1

    return optimize.brentq(diff, curve.lambda_m, curve.lambda_M, xtol=1e-15, rtol=1e-15, maxiter=500)


@dataclass(frozen=True)
class ClassificationReport:
    params: CubicParams
    level: float
    regime: Regime
    branch_freqs: list[tuple[int, float]]
    energies: list[float]
    slopes: list[float]
    degenerate: list[bool]
    minimizer_count: int
    minimizing_branches: tuple[int, ...]
    areas: Optional[tuple[float, float]] = None
    lambda2: Optional[float] = None
    distance_to_lambda2: Optional[float] = None

    @property
    def frequencies(self) -> list[float]:
        return [w for _, w in self.branch_freqs]

    @property
    def degenerate_minimum(self) -> bool:
        idx = [i for i, _ in self.branch_freqs]
        return any(self.degenerate[idx.index(b)] for b in self.minimizing_branches)


def classify(p: CubicParams, lam: float) -> ClassificationReport:
    branches = branch_frequencies(p, lam)
    omegas = np.array([w for _, w in branches])
    energies = [float(e) for e in np.atleast_1d(energy_closed(p, omegas))]
    slopes = [float(s) for s in np.atleast_1d(lambda_prime(p, omegas))]
    degenerate = [abs(s) <= DEGENERACY_SLOPE for s in slopes]
    curve = critical_frequencies(p)

    areas = lam2 = dist = None
    count = 1
    if len(branches) == 1:
        minimizers: tuple[int, ...] = (branches[0][0],)
    else:
        # two or three candidates: only possible inside the multiplicity window
        areas = equal_area_functions(p, lam)
        lam2 = find_lambda2(p)
        dist = lam - lam2
        if abs(dist) <= LAMBDA2_MATCH * lam2:
            minimizers, count = (1, 3), 2
        elif lam < lam2:
            minimizers = (1,)
        else:
            minimizers = (3,)
    if lam2 is None and curve.regime is Regime.MULTIPLICITY_WINDOW:
        lam2 = find_lambda2(p)
        dist = lam - lam2
    return ClassificationReport(
        params=p,
        level=float(lam),
        regime=curve.regime,
        branch_freqs=branches,
        energies=energies,
        slopes=slopes,
        degenerate=degenerate,
        minimizer_count=count,
        minimizing_branches=minimizers,
        areas=areas,
        lambda2=lam2,
        distance_to_lambda2=dist,
    )


# constrained Hessian -------------------------------------------------------

@dataclass(frozen=True)
class HessianCheck:
    omega: float
    n: int
    L: float
    h: float
    smallest_constrained_singular_value: float
    coarse_singular_value: float
    refinement_ratio: float
    lowest_eigenvalue: float
    threshold: float = HESSIAN_FLOOR
    ratio_threshold: float = HESSIAN_RATIO
    grid: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return (
            self.refinement_ratio < self.ratio_threshold
            and self.smallest_constrained_singular_value < self.threshold
        )

    @property
    def verdict(self) -> str:
        return "degenerate" if self.degenerate else "nondegenerate"


def _even_lplus(profile: Profile):
    """Symmetrized even-sector L+ = -d^2/dx^2 + G''(R) + omega with Dirichlet data at x = L.

    Unknowns sit at x = j h, j = 0..n-1; the x = 0 row carries weight 1 and the
    others weight 2 (mirror images), scaled by sqrt(weight) to make the matrix
    symmetric. Returns the diagonal, off-diagonal and the weighted profile.
    """
    n, h = profile.n, profile.h
    r = np.asarray(profile.rs[n : 2 * n])
    g2 = eval_G(profile.params, r)[2]
    diag = 2.0 / (h * h) + g2 + profile.omega
    off = np.full(n - 1, -1.0 / (h * h))
    off[0] = -math.sqrt(2.0) / (h * h)
    weights = np.full(n, math.sqrt(2.0))
    weights[0] = 1.0
    return diag, off, weights * r


def constrained_spectrum(profile: Profile) -> tuple[float, float, float]:
    """(sigma_min, nu_1, mu_1): smallest singular value of L+ projected off R on
    even functions, the lowest constrained eigenvalue, and the lowest eigenvalue of L+.

    Constrained eigenvalues solve the secular equation r^T (A - nu)^{-1} r = 0,
    one root between each pair of consecutive eigenvalues of A.
    """
    diag, off, r = _even_lplus(profile)
    mu = linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, 2))
    band = np.zeros((3, diag.size))
    band[0, 1:] = off
    band[2, :-1] = off

    def secular(nu):
        band[1] = diag - nu
        return float(r @ linalg.solve_banded((1, 1), band, r, check_finite=False))

    roots = []
    for left, right in ((mu[0], mu[1]), (mu[1], mu[2])):
        gap = right - left
        delta = 1e-9 * gap
        while secular(left + delta) > 0 or secular(right - delta) < 0:
            delta *= 1e-3
            if delta < 1e-15 * gap:
                break
        roots.append(optimize.brentq(secular, left + delta, right - delta, xtol=1e-16, rtol=1e-15, maxiter=500))
    sigma_min = min(abs(x) for x in roots)
    return float(sigma_min), float(roots[0]), float(mu[0])


def lplus_kernel_check(p: CubicParams, omega: float, n: int = 4096, L: float | None = None) -> HessianCheck:
    """Two-resolution test (n, 2n) of the constrained Hessian at R_omega."""
    if L is None:
        L = default_half_width(omega)
    coarse = constrained_spectrum(sample_profile(p, omega, n, L))
    fine_profile = sample_profile(p, omega, 2 * n, L)
    fine = constrained_spectrum(fine_profile)
    ratio = fine[0] / coarse[0] if coarse[0] > 0 else 0.0
    return HessianCheck(
        omega=float(omega),
        n=2 * n,
        L=float(L),
        h=fine_profile.h,
        smallest_constrained_singular_value=fine[0],
        coarse_singular_value=coarse[0],
        refinement_ratio=ratio,
        lowest_eigenvalue=fine[2],
        grid={"n_coarse": n, "n_fine": 2 * n, "L": float(L), "h_fine": fine_profile.h},
    )
