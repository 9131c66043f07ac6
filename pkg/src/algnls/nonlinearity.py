"""Implicit branch V(s) of the cubic s**2 = a V**3 + b V**2 + c V and the
nonlinearity G(s) = -s**2 V(s) / 2 built on it.

All evaluators accept scalars or numpy arrays; scalar in, float out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

ROOT_RTOL = 1e-13
ROOT_MAXITER = 60


class ParameterError(ValueError):
    """Raised for coefficient triples outside a, c > 0, sigma < 3."""

    def __init__(self, message: str, sigma: float | None = None):
        super().__init__(message)
        self.sigma = sigma


@dataclass(frozen=True)
class CubicParams:
    a: float
    b: float
    c: float
    sigma: float = field(init=False)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise ParameterError(f"coefficient {name} = {val!r} is not finite")
        if self.a <= 0 or self.c <= 0:
            raise ParameterError(
                f"coefficient sign violation: need a > 0 and c > 0, got a = {self.a}, c = {self.c}"
            )
        sigma = self.b * self.b / (self.a * self.c)
        if sigma >= 3:
            raise ParameterError(
                f"branch not globally extendable: σ = {sigma:.6g} "
                f"(σ = b²/(ac) must lie in [0, 3))",
                sigma=sigma,
            )
        object.__setattr__(self, "sigma", sigma)

    @property
    def growth_constant(self) -> float:
        """C = 6c/(3 - sigma), the constant in |V'(s)| <= C s and |G'(s)| <= C s**3."""
        return 6.0 * self.c / (3.0 - self.sigma)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


def validate_params(a: float, b: float, c: float) -> CubicParams:
    return CubicParams(float(a), float(b), float(c))


class BranchValue(NamedTuple):
    v: float | np.ndarray
    v1: float | np.ndarray
    v2: float | np.ndarray


def cubic(p: CubicParams, v):
    """P(v) = a v**3 + b v**2 + c v, written as v * (a v**2 + b v + c) to keep
    relative accuracy for small v."""
    return v * ((p.a * v + p.b) * v + p.c)


def cubic_prime(p: CubicParams, v):
    """P'(v) = 3a v**2 + 2b v + c; bounded below by c (3 - sigma) / 3."""
    return (3.0 * p.a * v + 2.0 * p.b) * v + p.c


def _solve_branch(p: CubicParams, s2: np.ndarray, guess: np.ndarray | None = None) -> np.ndarray:
    # Safeguarded Newton on the strictly increasing cubic P(v) = s2, v >= 0.
    lo = np.zeros_like(s2)
    hi = s2 / p.c + 1.0
    bad = cubic(p, hi) <= s2
    while np.any(bad):
        hi = np.where(bad, 2.0 * hi, hi)
        bad = cubic(p, hi) <= s2
    if guess is None:
        x = np.minimum(s2 / p.c, np.cbrt(s2 / p.a))
    else:
        x = guess
    x = np.clip(x, lo, hi)
    active = s2 > 0
    for _ in range(ROOT_MAXITER):
        f = cubic(p, x) - s2
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        x_new = x - f / cubic_prime(p, x)
        outside = (x_new <= lo) | (x_new >= hi)
        x_new = np.where(outside, 0.5 * (lo + hi), x_new)
        step = np.abs(x_new - x)
        x = np.where(active, x_new, x)
        active &= step > ROOT_RTOL * np.abs(x) + 1e-300
        if not np.any(active):
            break
    # final Newton polish; each converged lane is within a few ulps already
    x = x - (cubic(p, x) - s2) / cubic_prime(p, x)
    return np.where(s2 > 0, np.maximum(x, 0.0), 0.0)


def eval_V(p: CubicParams, s) -> BranchValue:
    """Value and first two derivatives of the increasing branch V at s >= 0."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or not np.all(np.isfinite(s_arr)):
        raise ValueError("eval_V requires finite s >= 0")
    v = _solve_branch(p, s_arr * s_arr)
    q = cubic_prime(p, v)
    v1 = 2.0 * s_arr / q
    v2 = (2.0 - (6.0 * p.a * v + 2.0 * p.b) * v1 * v1) / q
    # at s = 0 the formulas above already give (0, 0, 2/c); keep it explicit
    zero = s_arr == 0
    v = np.where(zero, 0.0, v)
    v1 = np.where(zero, 0.0, v1)
    v2 = np.where(zero, 2.0 / p.c, v2)
    if s_arr.ndim == 0:
        return BranchValue(float(v), float(v1), float(v2))
    return BranchValue(v, v1, v2)


def eval_T(p: CubicParams, omega):
    """Inverse of V: T(omega) = sqrt(a omega**3 + b omega**2 + c omega)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("eval_T requires omega >= 0")
    t = np.sqrt(cubic(p, w))
    return float(t) if t.ndim == 0 else t


def eval_G(p: CubicParams, s):
    """Return (G, G', G'') at s >= 0 for G(s) = -s**2 V(s)/2."""
    s_arr = np.asarray(s, dtype=float)
    v, v1, v2 = eval_V(p, s_arr)
    g0 = -0.5 * s_arr * s_arr * v
    g1 = -0.5 * (2.0 * s_arr * v + s_arr * s_arr * v1)
    g2 = -0.5 * (2.0 * v + 4.0 * s_arr * v1 + s_arr * s_arr * v2)
    if s_arr.ndim == 0:
        return float(g0), float(g1), float(g2)
    return g0, g1, g2


def phase_rate(p: CubicParams, rho, guess=None):
    """W(rho) = G'(rho)/rho = -(V + rho**2 / P'(V)), finite at rho = 0 with W(0) = G''(0) = 0.

    Returns (W, V); ``guess`` is an optional starting value for V(rho).
    """
    rho = np.asarray(rho, dtype=float)
    v = _solve_branch(p, rho * rho, guess)
    return -(v + rho * rho / cubic_prime(p, v)), v
