"""Soliton profiles R_omega and quadrature oracles for their mass and energy.

The profile solves R'' - G'(R) - omega R = 0 and obeys the first integral
R' = -R sqrt(omega - V(R)). Positions are recovered from amplitudes through

    x(r) = int_r^T(omega) ds / (s sqrt(omega - V(s))),

written in v = V(s) (so s = S(v) := sqrt(a v^3 + b v^2 + c v)). Two smooth
parametrizations cover the whole range:

* crest, v in [omega/2, omega]: v = omega - u^2, dx/du = P'(v)/P(v);
* tail, v in (0, omega/2]: eta = log v, dx/d(-eta) = P'(v) / (2 p(v) sqrt(omega - v))
  with p(v) = a v^2 + b v + c, which tends to 1/(2 sqrt(omega)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nonlinearity import CubicParams, cubic, cubic_prime, eval_G, eval_T, eval_V
from .quadrature import integrate, integrate_between

CREST_PANELS = 32
TAIL_PANEL_WIDTH = 0.25
NEWTON_ITERS = 12
GRID_FLOOR = 1e-300
TRUNCATION_RATIO = 1e-6


class DomainError(ValueError):
    """Raised when the requested grid or amplitude is outside the valid range."""


def default_half_width(omega: float) -> float:
    return max(20.0, 30.0 / math.sqrt(omega))


def _crest_rate(p: CubicParams, omega: float, u):
    v = omega - u * u
    return cubic_prime(p, v) / cubic(p, v)


def _tail_rate(p: CubicParams, omega: float, theta):
    # theta = -log v
    v = np.exp(-theta)
    return cubic_prime(p, v) / (2.0 * ((p.a * v + p.b) * v + p.c) * np.sqrt(omega - v))


def _crest_length(p: CubicParams, omega: float) -> float:
    u_star = math.sqrt(0.5 * omega)
    return integrate(lambda u: _crest_rate(p, omega, u), 0.0, u_star, panels=CREST_PANELS)


def position_of_amplitude(p: CubicParams, omega: float, r: float) -> float:
    """The x > 0 at which R_omega(x) = r, for 0 < r < T(omega)."""
    if omega <= 0:
        raise DomainError("omega must be positive")
    crest = eval_T(p, omega)
    if not 0.0 < r < crest:
        raise DomainError(f"amplitude out of range: r = {r!r} not in (0, {crest!r})")
    v = eval_V(p, r).v
    if v >= 0.5 * omega:
        u_end = math.sqrt(max(omega - v, 0.0))
        panels = max(1, math.ceil(CREST_PANELS * u_end / math.sqrt(0.5 * omega)))
        return integrate(lambda u: _crest_rate(p, omega, u), 0.0, u_end, panels=panels)
    theta_star = -math.log(0.5 * omega)
    theta_end = -math.log(v)
    panels = max(1, math.ceil((theta_end - theta_star) / TAIL_PANEL_WIDTH))
    tail = integrate(lambda t: _tail_rate(p, omega, t), theta_star, theta_end, panels=panels)
    return _crest_length(p, omega) + tail


def _invert_piece(rate, edges: np.ndarray, cum: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Solve cum[j] + int_{edges[j]}^{theta} rate = target inside the bracketing panel."""
    j = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(edges) - 2)
    lo, hi = edges[j], edges[j + 1]
    x_lo, x_hi = cum[j], cum[j + 1]
    theta = lo + (targets - x_lo) / (x_hi - x_lo) * (hi - lo)
    for _ in range(NEWTON_ITERS):
        resid = x_lo + integrate_between(rate, lo, theta) - targets
        step = resid / rate(theta)
        theta = np.clip(theta - step, lo, hi)
        if np.all(np.abs(step) <= 1e-15 * (1.0 + np.abs(theta))):
            break
    return theta


def amplitudes_at(p: CubicParams, omega: float, xs: np.ndarray) -> np.ndarray:
    """R_omega evaluated at positions xs >= 0 (vectorized monotone inversion)."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    u_star = math.sqrt(0.5 * omega)

    def crest_rate(u):
        return _crest_rate(p, omega, u)

    def tail_rate(t):
        return _tail_rate(p, omega, t)

    u_edges = np.linspace(0.0, u_star, CREST_PANELS + 1)
    crest_cum = np.concatenate(([0.0], np.cumsum(integrate_between(crest_rate, u_edges[:-1], u_edges[1:]))))
    x_crest = crest_cum[-1]

    in_crest = xs <= x_crest
    if np.any(in_crest):
        u = _invert_piece(crest_rate, u_edges, crest_cum, xs[in_crest])
        out[in_crest] = np.sqrt(cubic(p, omega - u * u))
    if np.all(in_crest):
        return out

    x_max = float(xs.max())
    theta_star = -math.log(0.5 * omega)
    # tail rate tends to 1/(2 sqrt(omega)); extend until the table reaches x_max
    span = 2.0 * math.sqrt(omega) * (x_max - x_crest) + 4.0
    while True:
        count = max(2, math.ceil(span / TAIL_PANEL_WIDTH))
        t_edges = theta_star + TAIL_PANEL_WIDTH * np.arange(count + 1)
        tail_cum = x_crest + np.concatenate(
            ([0.0], np.cumsum(integrate_between(tail_rate, t_edges[:-1], t_edges[1:])))
        )
        if tail_cum[-1] >= x_max or t_edges[-1] > 740.0:
            break
        span *= 2.0
    tgt = xs[~in_crest]
    beyond = tgt >= tail_cum[-1]
    theta = _invert_piece(tail_rate, t_edges, tail_cum, np.minimum(tgt, tail_cum[-1]))
    r = np.sqrt(cubic(p, np.exp(-theta)))
    r[beyond] = 0.0
    r[r < GRID_FLOOR] = 0.0
    out[~in_crest] = r
    return out


@dataclass(frozen=True)
class Profile:
    params: CubicParams
    omega: float
    n: int
    L: float
    xs: np.ndarray
    rs: np.ndarray
    mass: float
    energy: float

    @property
    def h(self) -> float:
        return self.L / self.n

    @property
    def center(self) -> int:
        return self.n

    @property
    def crest(self) -> float:
        return float(self.rs[self.n])


def sample_profile(p: CubicParams, omega: float, n: int = 2048, L: float | None = None) -> Profile:
    """R_omega on x_k = -L + k L/n, k = 0..2n, mirrored from x >= 0."""
    if omega <= 0:
        raise DomainError("omega must be positive")
    if n < 64:
        raise DomainError(f"grid half-count n = {n} is below the minimum of 64")
    if L is None:
        L = default_half_width(omega)
    if L <= 0:
        raise DomainError("half-width L must be positive")
    h = L / n
    half = amplitudes_at(p, omega, h * np.arange(n + 1))
    crest = eval_T(p, omega)
    if half[-1] > TRUNCATION_RATIO * crest:
        raise DomainError(
            f"domain truncation too aggressive: R({L:g}) = {half[-1]:.3g} exceeds "
            f"{TRUNCATION_RATIO:g} * T(omega); increase L"
        )
    rs = np.concatenate((half[:0:-1], half))
    xs = -L + h * np.arange(2 * n + 1)
    xs[n] = 0.0
    rs.setflags(write=False)
    xs.setflags(write=False)
    return Profile(
        params=p,
        omega=float(omega),
        n=int(n),
        L=float(L),
        xs=xs,
        rs=rs,
        mass=mass_numeric(p, omega),
        energy=energy_numeric(p, omega),
    )


def _ss_prime(p: CubicParams, omega: float, t):
    """S(v) S'(v) and V(S(v)) at v = omega - t^2, with S' = 1 / V'(S) from the branch solver."""
    v = omega - t * t
    s = np.sqrt(cubic(p, v))
    bv = eval_V(p, s)
    return s / bv.v1, bv.v


def mass_numeric(p: CubicParams, omega: float, panels: int = 256) -> float:
    """2 int_0^T s ds / sqrt(omega - V(s)) = 4 int_0^sqrt(omega) S S'(omega - t^2) dt."""
    if omega < 0:
        raise DomainError("omega must be nonnegative")
    if omega == 0:
        return 0.0
    return 4.0 * integrate(lambda t: _ss_prime(p, omega, t)[0], 0.0, math.sqrt(omega), panels=panels)


def energy_numeric(p: CubicParams, omega: float, panels: int = 256) -> float:
    """E(R_omega) = int_0^T s sqrt(omega - V) ds - int_0^T s V / sqrt(omega - V) ds,
    both taken in t = sqrt(omega - v): 2 int_0^sqrt(omega) S S' (t^2 - V) dt."""
    if omega < 0:
        raise DomainError("omega must be nonnegative")
    if omega == 0:
        return 0.0

    def integrand(t):
        ssp, v = _ss_prime(p, omega, t)
        return ssp * (t * t - v)

    return 2.0 * integrate(integrand, 0.0, math.sqrt(omega), panels=panels)


# grid diagnostics --------------------------------------------------------

def _spectral_derivative(f: np.ndarray, h: float) -> np.ndarray:
    k = 2.0 * np.pi * np.fft.fftfreq(f.size, d=h)
    return np.real(np.fft.ifft(1j * k * np.fft.fft(f)))


def grid_mass(profile: Profile) -> float:
    return float(profile.h * np.sum(profile.rs[:-1] ** 2))


def grid_energy(profile: Profile) -> float:
    """Energy of the sampled profile: spectral derivative, rectangle rule on the periodic grid."""
    r = np.asarray(profile.rs[:-1])
    dr = _spectral_derivative(r, profile.h)
    g = eval_G(profile.params, r)[0]
    return float(profile.h * (0.5 * np.sum(dr * dr) + np.sum(g)))


def _second_difference(r: np.ndarray, h: float, order: int) -> tuple[np.ndarray, slice]:
    if order == 2:
        return (r[2:] - 2.0 * r[1:-1] + r[:-2]) / (h * h), slice(1, -1)
    if order == 4:
        d2 = (-r[4:] + 16.0 * r[3:-1] - 30.0 * r[2:-2] + 16.0 * r[1:-3] - r[:-4]) / (12.0 * h * h)
        return d2, slice(2, -2)
    raise ValueError("order must be 2 or 4")


def _first_difference(r: np.ndarray, h: float, order: int) -> tuple[np.ndarray, slice]:
    if order == 2:
        return (r[2:] - r[:-2]) / (2.0 * h), slice(1, -1)
    if order == 4:
        return (-r[4:] + 8.0 * r[3:-1] - 8.0 * r[1:-3] + r[:-4]) / (12.0 * h), slice(2, -2)
    raise ValueError("order must be 2 or 4")


def elliptic_residual(profile: Profile, order: int = 4) -> float:
    """Sup over interior nodes of |D2 R - G'(R) - omega R|.

    ``order`` selects the 3-point (2) or 5-point (4) second difference.
    """
    r = np.asarray(profile.rs)
    d2, inner = _second_difference(r, profile.h, order)
    g1 = eval_G(profile.params, r[inner])[1]
    return float(np.max(np.abs(d2 - g1 - profile.omega * r[inner])))


def first_order_residual(profile: Profile, order: int = 4) -> float:
    """Sup over interior nodes of |(D1 R)^2 - R^2 (omega - V(R))|."""
    r = np.asarray(profile.rs)
    d1, inner = _first_difference(r, profile.h, order)
    v = eval_V(profile.params, r[inner]).v
    return float(np.max(np.abs(d1 * d1 - r[inner] ** 2 * (profile.omega - v))))
