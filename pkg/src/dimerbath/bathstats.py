"""Damping kernel and spectral density of the chain as seen from the system."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .chain import (
    ChainParams,
    band_edges,
    build_bath_potential,
    diagonalize,
    mode_couplings,
)


@dataclass(frozen=True)
class BathSpectrum:
    omegas: np.ndarray
    weights: np.ndarray  # g_i**2 / omega_i
    omega_grid: np.ndarray
    smoothed_J: np.ndarray
    delta_omega: float
    t_grid: np.ndarray
    kernel: np.ndarray


def damping_kernel(gs, omegas, t_grid):
    """gamma(t) = sum_i g_i^2 / w_i^2 cos(w_i t), summed exactly."""
    gs = np.asarray(gs, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    if gs.shape != omegas.shape:
        raise ValueError("couplings and frequencies must have the same length")
    if np.any(omegas <= 0):
        raise ValueError("frequencies must be positive")
    amp = gs**2 / omegas**2
    t = np.asarray(t_grid, dtype=float)
    return np.cos(np.multiply.outer(t, omegas)) @ amp


def spectral_density_binned(gs, omegas, omega_grid, delta_omega):
    """Delta weights g_i^2/w_i spread by normalized Gaussians of width delta_omega."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if len(omega_grid) > 1:
        step = np.max(np.diff(omega_grid))
        if not delta_omega > step:
            raise ValueError(
                f"delta_omega={delta_omega:g} must exceed the grid spacing {step:g}"
            )
    gs = np.asarray(gs, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    w = gs**2 / omegas
    x = (omega_grid[:, None] - omegas[None, :]) / delta_omega
    return np.exp(-0.5 * x * x) @ w / (np.sqrt(2 * np.pi) * delta_omega)


def hann_taper(t, t_max):
    """Even Hann taper: 1 at t=0, 0 at t=t_max."""
    return 0.5 * (1 + np.cos(np.pi * np.asarray(t) / t_max))


def spectral_from_kernel(gamma_samples, t_max, omega_grid):
    """J(w) = (2/pi) w int_0^tmax taper(t) gamma(t) cos(w t) dt.

    ``gamma_samples`` are on a uniform grid from 0 to ``t_max`` inclusive.
    The 2/pi makes each cosine in gamma transform to a unit-weight peak, so the
    result is directly comparable with :func:`spectral_density_binned`.
    """
    gamma = np.asarray(gamma_samples, dtype=float)
    t = np.linspace(0.0, t_max, len(gamma))
    f = hann_taper(t, t_max) * gamma
    omega_grid = np.asarray(omega_grid, dtype=float)
    out = np.empty_like(omega_grid)
    # chunk to keep the cos table bounded
    for lo in range(0, len(omega_grid), 256):
        w = omega_grid[lo : lo + 256]
        out[lo : lo + 256] = trapezoid(f * np.cos(np.multiply.outer(w, t)), t, axis=1)
    return (2 / np.pi) * omega_grid * out


def default_delta_omega(omegas):
    """Three times the mean eigenfrequency spacing."""
    return 3.0 * float(np.mean(np.diff(np.sort(omegas))))


def kernel_time_step(omegas):
    return 0.1 / float(np.max(omegas))


def bath_spectrum(
    chain: ChainParams,
    kappa: float,
    omega_grid=None,
    delta_omega=None,
    t_max: float = 500.0,
    dt=None,
) -> BathSpectrum:
    modes = diagonalize(build_bath_potential(chain))
    gs = mode_couplings(modes, kappa)
    w = modes.frequencies
    if delta_omega is None:
        delta_omega = default_delta_omega(w)
    if omega_grid is None:
        omega_grid = np.linspace(0.0, 1.2 * w.max(), 2401)
    if dt is None:
        dt = kernel_time_step(w)
    n_t = int(np.ceil(t_max / dt)) + 1
    t_grid = np.linspace(0.0, t_max, n_t)
    return BathSpectrum(
        omegas=w,
        weights=gs**2 / w,
        omega_grid=omega_grid,
        smoothed_J=spectral_density_binned(gs, w, omega_grid, delta_omega),
        delta_omega=delta_omega,
        t_grid=t_grid,
        kernel=damping_kernel(gs, w, t_grid),
    )


def band_peaks(omega_grid, J, chain: ChainParams):
    """Location of the maximum of J inside each band (acoustic, optical)."""
    top_a, bottom_o, top_o, bottom_a = band_edges(chain)
    gap = 0.5 * (bottom_o - top_a)
    out = []
    for lo, hi in ((0.0, top_a + 0.5 * gap), (bottom_o - 0.5 * gap, np.inf)):
        m = (omega_grid >= lo) & (omega_grid < hi)
        out.append(float(omega_grid[m][np.argmax(J[m])]))
    return tuple(out)


@dataclass(frozen=True)
class OhmicReport:
    g: float
    omega0: float
    N: int
    cutoff_expected: float  # sqrt(omega0^2 + 4g)
    highest_mode: float
    slope: float  # fitted constant J/omega
    max_relative_deviation: float
    above_cutoff_ratio: float  # max J above 1.05 wc over peak J

    @property
    def cutoff_error(self):
        return abs(self.highest_mode - self.cutoff_expected) / self.cutoff_expected


def ohmic_limit_check(
    g: float, omega0: float = 1e-3, N: int = 225, kappa: float = 1e-4, delta_omega=None
) -> OhmicReport:
    """Fit J(w)/w to a constant on [0.1 wc, 0.4 wc] for the monatomic chain g = h."""
    chain = ChainParams(N=N, omega0=omega0, g=g, h=g)
    modes = diagonalize(build_bath_potential(chain))
    gs = mode_couplings(modes, kappa)
    w = modes.frequencies
    wc = 2 * np.sqrt(g)
    if delta_omega is None:
        delta_omega = default_delta_omega(w)
    grid = np.linspace(0.0, 1.5 * wc, 3001)
    J = spectral_density_binned(gs, w, grid, delta_omega)
    fit = (grid >= 0.1 * wc) & (grid <= 0.4 * wc)
    ratio = J[fit] / grid[fit]
    # least-squares constant is the mean
    slope = float(np.mean(ratio))
    above = grid > 1.05 * wc
    return OhmicReport(
        g=g,
        omega0=omega0,
        N=N,
        cutoff_expected=float(np.sqrt(omega0**2 + 4 * g)),
        highest_mode=float(w.max()),
        slope=slope,
        max_relative_deviation=float(np.max(np.abs(ratio / slope - 1))),
        above_cutoff_ratio=float(J[above].max() / J.max()),
    )
