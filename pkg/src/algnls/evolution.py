"""Split-step Fourier integration of

    i phi_t + phi_xx - G'(|phi|) phi / |phi| = 0

on a periodic box, and orbit-distance diagnostics around a standing wave
e^{i omega t} R_omega(x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize

from .nonlinearity import CubicParams, eval_G, phase_rate
from .profile import Profile, sample_profile

PERTURBATION_MODES = ("even", "odd", "phase", "random")


class BlowUpError(RuntimeError):
    """Raised when the field stops being finite."""


@dataclass(frozen=True)
class EvolutionState:
    """Field on the periodic grid x_k = -L + k h, k = 0..2n-1.

    ``params=None`` switches the nonlinearity off (free Schrodinger flow).
    """

    params: Optional[CubicParams]
    L: float
    field: np.ndarray
    dt: float = 1e-3
    t: float = 0.0
    mass0: float = float("nan")
    energy0: float = float("nan")

    @property
    def size(self) -> int:
        return self.field.size

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.field.size

    @property
    def xs(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.field.size)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.field.size, d=self.h)


def make_state(params: Optional[CubicParams], L: float, field: np.ndarray, dt: float = 1e-3) -> EvolutionState:
    field = np.asarray(field, dtype=complex).copy()
    if not np.all(np.isfinite(field)):
        raise ValueError("initial field must be finite")
    field.setflags(write=False)
    st = EvolutionState(params, float(L), field, float(dt))
    return replace(st, mass0=discrete_mass(st), energy0=discrete_energy(st))


def state_from_profile(profile: Profile, dt: float = 1e-3, phase: float = 0.0) -> EvolutionState:
    """e^{i phase} R on the periodic grid (the profile's x = L node is dropped)."""
    return make_state(profile.params, profile.L, np.exp(1j * phase) * np.asarray(profile.rs[:-1]), dt)


def discrete_mass(state: EvolutionState) -> float:
    return float(state.h * np.sum(np.abs(state.field) ** 2))


def discrete_energy(state: EvolutionState) -> float:
    """1/2 sum |D phi|^2 h + sum G(|phi|) h, D the spectral derivative."""
    k = state.wavenumbers
    fhat = np.fft.fft(state.field)
    kinetic = 0.5 * state.h * np.sum(k * k * np.abs(fhat) ** 2) / state.size
    if state.params is None:
        return float(kinetic)
    potential = state.h * np.sum(eval_G(state.params, np.abs(state.field))[0])
    return float(kinetic + potential)


def _nonlinear(params: Optional[CubicParams], phi: np.ndarray, tau: float, guess=None):
    # i phi_t = W(|phi|) phi with W = G'(rho)/rho; |phi| is invariant along this flow
    if params is None:
        return phi, None
    w, v = phase_rate(params, np.abs(phi), guess)
    return phi * np.exp(-1j * tau * w), v


def step(state: EvolutionState, n_steps: int) -> EvolutionState:
    """Advance by n_steps Strang steps: half nonlinear, full linear, half nonlinear.

    Adjacent half nonlinear substeps are fused into full ones.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if n_steps == 0:
        return state
    dt = state.dt
    k = state.wavenumbers
    propagator = np.exp(-1j * k * k * dt)
    phi, v = _nonlinear(state.params, np.array(state.field), 0.5 * dt)
    for i in range(n_steps):
        phi = np.fft.ifft(propagator * np.fft.fft(phi))
        # V(|phi|) from the previous substep is a close Newton start
        phi, v = _nonlinear(state.params, phi, dt if i < n_steps - 1 else 0.5 * dt, v)
    if not np.all(np.isfinite(phi)):
        raise BlowUpError(f"blow-up or instability detected before t = {state.t + n_steps * dt:g}")
    phi.setflags(write=False)
    return replace(state, field=phi, t=state.t + n_steps * dt)


# orbit distance ---------------------------------------------------------

def h1_norm(values: np.ndarray, h: float) -> float:
    """Discrete H^1 norm on the periodic grid with spectral derivative."""
    n = values.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    fhat = np.fft.fft(values)
    return float(math.sqrt(h * np.sum((1.0 + k * k) * np.abs(fhat) ** 2) / n))


@dataclass(frozen=True)
class OrbitFit:
    distance: float
    shift: float
    phase: float


def orbit_fit(field: np.ndarray, profile_values: np.ndarray, h: float) -> OrbitFit:
    """Minimize ||phi - e^{i theta} R(. - y)||_{H^1} over theta and y.

    For fixed y the optimal phase is arg <phi, R_y>_{H^1}, so only y is searched:
    all grid shifts at once by FFT correlation, then a continuous refinement
    on the neighbouring cells using the Fourier-interpolated translate.
    """
    n = field.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    weight = 1.0 + k * k
    fhat = np.fft.fft(field)
    rhat = np.fft.fft(profile_values)
    cross = fhat * np.conj(rhat) * weight

    # <phi, R(. - j h)> for every integer j
    corr = np.fft.ifft(cross) * (h)
    j = int(np.argmax(np.abs(corr)))
    y0 = (j if j <= n // 2 else j - n) * h

    def overlap(y):
        return h * np.sum(cross * np.exp(1j * k * y)) / n

    def slope(y):
        c = overlap(y)
        dc = h * np.sum(cross * (1j * k) * np.exp(1j * k * y)) / n
        return float(np.real(np.conj(c) * dc))

    y = y0
    lo, hi = y0 - h, y0 + h
    s_lo, s_hi = slope(lo), slope(hi)
    if s_lo > 0 > s_hi:
        y = optimize.brentq(slope, lo, hi, xtol=1e-14, rtol=1e-15)
    else:
        res = optimize.minimize_scalar(lambda t: -abs(overlap(t)), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        y = float(res.x)
    theta = float(np.angle(overlap(y)))
    diff = fhat - np.exp(1j * theta) * rhat * np.exp(-1j * k * y)
    dist = math.sqrt(h * np.sum(weight * np.abs(diff) ** 2) / n)
    return OrbitFit(distance=dist, shift=float(y), phase=theta)


def orbit_distance(state: EvolutionState, profile: Profile) -> float:
    r = np.asarray(profile.rs[:-1])
    if r.size != state.size or not math.isclose(profile.L, state.L):
        raise ValueError("profile and state grids are incompatible")
    return orbit_fit(state.field, r, state.h).distance


def fourier_shift(values: np.ndarray, y: float, h: float) -> np.ndarray:
    """Band-limited translate f(. - y) of periodic samples."""
    k = 2.0 * np.pi * np.fft.fftfreq(values.size, d=h)
    return np.fft.ifft(np.fft.fft(values) * np.exp(-1j * k * y))


# stability experiment ---------------------------------------------------

@dataclass(frozen=True)
class OrbitDistanceSeries:
    times: np.ndarray
    distances: np.ndarray
    mass_drift: np.ndarray
    energy_drift: np.ndarray
    perturbation_size: float
    profile_h1: float
    omega: float
    eps: float
    mode: str

    @property
    def max_distance(self) -> float:
        return float(np.max(self.distances))


def _h1_inner(f: np.ndarray, g: np.ndarray, h: float) -> complex:
    k = 2.0 * np.pi * np.fft.fftfreq(f.size, d=h)
    return complex(h * np.sum((1.0 + k * k) * np.conj(np.fft.fft(g)) * np.fft.fft(f)) / f.size)


def perturbation(profile: Profile, mode: str, eps: float, seed: int = 0) -> np.ndarray:
    """Initial datum R + eps ||R||_{H^1} m with ||m||_{H^1} = 1 (``phase``: R e^{i kappa x}).

    The odd bump has its component along the translation direction R' removed,
    so that the prepared size is also the initial distance to the orbit.
    """
    if mode not in PERTURBATION_MODES:
        raise ValueError(f"unknown perturbation mode {mode!r}; choose from {PERTURBATION_MODES}")
    r = np.asarray(profile.rs[:-1])
    x = np.asarray(profile.xs[:-1])
    h = profile.h
    size = eps * h1_norm(r, h)
    if mode == "even":
        m = np.exp(-x * x).astype(complex)
    elif mode == "odd":
        m = (x * np.exp(-x * x)).astype(complex)
        dr = np.real(np.fft.ifft(1j * 2.0 * np.pi * np.fft.fftfreq(r.size, d=h) * np.fft.fft(r)))
        m = m - _h1_inner(m, dr, h) / _h1_inner(dr, dr, h) * dr
    elif mode == "phase":
        ramp = x * r
        kappa = size / h1_norm(ramp, h) if eps > 0 else 0.0
        return r * np.exp(1j * kappa * x)
    else:
        rng = np.random.default_rng(seed)
        coeffs = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        width = 1.0 / math.sqrt(profile.omega)
        m = sum(c * np.cos(j * x / width) for j, c in enumerate(coeffs)) * np.exp(-(x / (2.0 * width)) ** 2)
    return r + size * m / h1_norm(m, h)


def default_grid(omega: float) -> tuple[int, float]:
    """(n, L) with R(L) ~ e^{-30} T and spacing resolving the e^{-sqrt(omega)|x|} scale."""
    L = max(20.0, 30.0 / math.sqrt(omega))
    h_max = min(0.1, 0.3 / math.sqrt(omega))
    n = 1 << max(6, math.ceil(math.log2(L / h_max)))
    return n, L


def stability_experiment(
    p: CubicParams,
    omega: float,
    eps: float,
    T: float,
    mode: str = "even",
    dt: float = 1e-3,
    samples: int = 100,
    n: int | None = None,
    L: float | None = None,
    seed: int = 0,
) -> OrbitDistanceSeries:
    """Evolve R_omega + eps-perturbation to time T, sampling the orbit distance."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if not 0.0 <= eps <= 0.1:
        raise ValueError("eps must lie in [0, 0.1]")
    if not 0.0 < T <= 100.0:
        raise ValueError("horizon T must lie in (0, 100]")
    n0, L0 = default_grid(omega)
    n = n or n0
    L = L or L0
    profile = sample_profile(p, omega, n, L)
    r = np.asarray(profile.rs[:-1])
    state = make_state(p, L, perturbation(profile, mode, eps, seed), dt)
    total = int(round(T / dt))
    marks = np.unique(np.round(np.linspace(0, total, samples + 1)).astype(int))
    times, dists, dm, de = [], [], [], []
    done = 0
    for mark in marks:
        state = step(state, int(mark - done))
        done = int(mark)
        times.append(state.t)
        dists.append(orbit_fit(state.field, r, state.h).distance)
        dm.append(discrete_mass(state) / state.mass0 - 1.0)
        de.append(discrete_energy(state) / state.energy0 - 1.0)
    return OrbitDistanceSeries(
        times=np.array(times),
        distances=np.array(dists),
        mass_drift=np.array(dm),
        energy_drift=np.array(de),
        perturbation_size=eps * h1_norm(r, profile.h),
        profile_h1=h1_norm(r, profile.h),
        omega=float(omega),
        eps=float(eps),
        mode=mode,
    )
