"""Closed-form mass curve lambda(omega), its derivative, the energy curve
e(omega) and the critical frequencies where lambda' vanishes."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .nonlinearity import CubicParams

SIGMA2_BAND = 1e-9


class Regime(enum.Enum):
    UNIQUE_NONDEGENERATE = "UniqueNondegenerate"
    UNIQUE_DEGENERATE_LEVEL = "UniqueDegenerateLevel"
    MULTIPLICITY_WINDOW = "MultiplicityWindow"

    def __str__(self):
        return self.value


def regime(p: CubicParams) -> Regime:
    # b >= 0 keeps every root of 8a w^2 + 4b w + c off the positive axis
    if p.b >= 0 or p.sigma < 2.0 - SIGMA2_BAND:
        return Regime.UNIQUE_NONDEGENERATE
    if abs(p.sigma - 2.0) <= SIGMA2_BAND:
        return Regime.UNIQUE_DEGENERATE_LEVEL
    return Regime.MULTIPLICITY_WINDOW


def lambda_closed(p: CubicParams, omega):
    """lambda(w) = 16a/5 w^(5/2) + 8b/3 w^(3/2) + 2c w^(1/2); zero at w = 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("lambda_closed requires omega >= 0")
    r = np.sqrt(w) * ((16.0 * p.a / 5.0 * w + 8.0 * p.b / 3.0) * w + 2.0 * p.c)
    return float(r) if r.ndim == 0 else r


def lambda_prime(p: CubicParams, omega):
    """lambda'(w) = w^(-1/2) (8a w^2 + 4b w + c)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("lambda_prime requires omega > 0 (diverges like c/sqrt(omega) at 0)")
    r = ((8.0 * p.a * w + 4.0 * p.b) * w + p.c) / np.sqrt(w)
    return float(r) if r.ndim == 0 else r


def lambda_antiderivative(p: CubicParams, omega):
    """Lambda(w) = 32a/35 w^(7/2) + 16b/15 w^(5/2) + 4c/3 w^(3/2), with Lambda' = lambda."""
    w = np.asarray(omega, dtype=float)
    r = w * np.sqrt(w) * ((32.0 * p.a / 35.0 * w + 16.0 * p.b / 15.0) * w + 4.0 * p.c / 3.0)
    return float(r) if r.ndim == 0 else r


def energy_closed(p: CubicParams, omega):
    """e(w) = -1/2 (16a/7 w^(7/2) + 8b/5 w^(5/2) + 2c/3 w^(3/2)).

    The antiderivative of -(w/2) lambda'(w) that vanishes at w = 0.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("energy_closed requires omega >= 0")
    r = -0.5 * w * np.sqrt(w) * ((16.0 * p.a / 7.0 * w + 8.0 * p.b / 5.0) * w + 2.0 * p.c / 3.0)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class LambdaCurve:
    params: CubicParams
    regime: Regime
    omega_m: Optional[float] = None
    omega_M: Optional[float] = None
    omega_d: Optional[float] = None
    lambda_m: Optional[float] = None
    lambda_M: Optional[float] = None
    lambda_d: Optional[float] = None

    @property
    def critical_omegas(self) -> list[float]:
        return [w for w in (self.omega_m, self.omega_M, self.omega_d) if w is not None]

    @property
    def has_window(self) -> bool:
        return self.omega_m is not None


def critical_frequencies(p: CubicParams) -> LambdaCurve:
    """Positive roots of 8a w^2 + 4b w + c and the mass levels attained there."""
    reg = regime(p)
    if reg is Regime.UNIQUE_NONDEGENERATE:
        return LambdaCurve(p, reg)
    if reg is Regime.UNIQUE_DEGENERATE_LEVEL:
        wd = -p.b / (4.0 * p.a)
        return LambdaCurve(p, reg, omega_d=wd, lambda_d=lambda_closed(p, wd))
    # 2 < sigma < 3 and b < 0: two simple roots. The smaller one is computed
    # from the product of roots c/(8a) to avoid cancellation.
    disc = math.sqrt(p.b * p.b - 2.0 * p.a * p.c)
    w_big = (-p.b + disc) / (4.0 * p.a)
    w_small = p.c / (8.0 * p.a * w_big)
    return LambdaCurve(
        p,
        reg,
        omega_m=w_small,
        omega_M=w_big,
        lambda_m=lambda_closed(p, w_big),
        lambda_M=lambda_closed(p, w_small),
    )
