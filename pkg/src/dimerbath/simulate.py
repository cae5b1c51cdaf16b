"""Time evolution of system + chain and the propagation diagnostics built on it."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .chain import (
    ChainParams,
    SystemParams,
    build_bath_potential,
    build_full_potential,
    diagonalize,
)
from .gaussian import (
    CovarianceState,
    direct_sum,
    entropy_function,
    evolve,
    mutual_information_with,
    propagator,
    squeezed_vacuum_covariance,
    symplectic_eigenvalues,
    thermal_covariance,
)

REGIMES = ("confined", "dressed-edge", "ballistic")


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    chain: ChainParams = field(default_factory=ChainParams)
    sys: SystemParams = field(default_factory=SystemParams)
    T: float = 0.0
    r: float = 1.0
    t_grid: np.ndarray = field(default_factory=lambda: np.arange(0.0, 501.0))
    observed_sites: Optional[tuple] = None  # None means every site
    front_threshold: float = 0.05
    front_hold: int = 2
    min_front_sites: int = 10
    ballistic_sites: int = 30
    confinement_ratio: float = 0.01
    confinement_from_site: int = 10

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        if t.ndim != 1 or len(t) == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be strictly increasing and start at 0")
        object.__setattr__(self, "t_grid", t)
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got {self.T!r}")
        if self.observed_sites is not None:
            sites = tuple(int(n) for n in self.observed_sites)
            if not sites:
                raise ValueError("observed_sites must not be empty")
            if min(sites) < 1 or max(sites) > self.chain.N:
                raise ValueError(f"observed_sites must lie in 1..{self.chain.N}")
            if len(set(sites)) != len(sites):
                raise ValueError("observed_sites must be distinct")
            object.__setattr__(self, "observed_sites", tuple(sorted(sites)))
        if not 0 < self.front_threshold < 1:
            raise ValueError("front_threshold must lie in (0, 1)")

    @property
    def sites(self) -> np.ndarray:
        if self.observed_sites is None:
            return np.arange(1, self.chain.N + 1)
        return np.asarray(self.observed_sites)

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    sites: np.ndarray
    energy: np.ndarray  # (len(times), len(sites)) excess local energy
    mi: np.ndarray  # (len(times), len(sites)) I(S:n)
    system_entropy: np.ndarray
    system_energy: np.ndarray
    total_energy: np.ndarray

    def site_column(self, n: int) -> int:
        hits = np.nonzero(self.sites == n)[0]
        if not len(hits):
            raise KeyError(f"site {n} was not observed")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class FrontFit:
    arrival_times: np.ndarray  # nan where the front never arrived
    sites: np.ndarray
    velocity: float  # sites per unit time; nan when unfit
    intercept: float
    residual: float  # rms of n - (intercept + velocity t_n)
    n_reached: int
    fitted: bool


@dataclass(frozen=True, eq=False)
class PenetrationProfile:
    sites: np.ndarray
    max_mi: np.ndarray
    max_energy: np.ndarray
    decay_length: float
    r_squared: float
    fitted: bool


@dataclass(frozen=True, eq=False)
class RegimeReport:
    label: str
    oscillation_count: int
    confinement_ratio: float
    front: FrontFit


def initial_state(config: ScenarioConfig) -> CovarianceState:
    """Squeezed system (mode 0) times the bath Gibbs state (modes 1..N)."""
    bath_modes = diagonalize(build_bath_potential(config.chain))
    return direct_sum(
        squeezed_vacuum_covariance(config.sys.omegaS, config.r),
        thermal_covariance(bath_modes, config.T),
    )


def total_energy(state: CovarianceState, V: np.ndarray) -> float:
    """<H> = tr(sigma_pp)/2 + tr(V sigma_qq)/2."""
    if V.shape != (state.M, state.M):
        raise ValueError(f"V has shape {V.shape}, state has {state.M} modes")
    return float(0.5 * np.trace(state.pp()) + 0.5 * np.sum(V * state.qq()))


def local_stiffness(V: np.ndarray) -> np.ndarray:
    """V with the system-bath coupling removed; rows give each mode's own share."""
    W = np.array(V, dtype=float)
    W[0, 1:] = 0.0
    W[1:, 0] = 0.0
    return W


def local_energies(state: CovarianceState, W: np.ndarray) -> np.ndarray:
    """<p_n^2>/2 + sum_m W[n, m] <q_n q_m>/2 for every mode.

    Each bond's cross term is split equally between its two sites, so the bath
    entries sum to <H_B> exactly and the system entry is its free energy.
    """
    M = state.M
    return 0.5 * np.diag(state.sigma)[M:] + 0.5 * np.sum(W * state.qq(), axis=1)


def site_energy(state: CovarianceState, n: int, W: np.ndarray, baseline: float = 0.0) -> float:
    """Excess local energy of mode n over ``baseline`` (see :func:`local_energies`)."""
    M = state.M
    own = 0.5 * state.sigma[M + n, M + n] + 0.5 * float(W[n] @ state.sigma[n, :M])
    return float(own - baseline)


def run(config: ScenarioConfig, threads: int = 1) -> Trajectory:
    """Evolve the initial state exactly to every time in ``config.t_grid``.

    Each time is propagated directly from t = 0.
    """
    V = build_full_potential(config.chain, config.sys)
    modes = diagonalize(V)
    sigma0 = initial_state(config)
    symplectic_eigenvalues(sigma0)  # raises if unphysical
    sites = config.sites
    W = local_stiffness(V)

    def observe(t):
        # O O^T is the identity only up to roundoff, so t = 0 is taken verbatim
        state = sigma0 if t == 0 else evolve(sigma0, propagator(modes, t))
        loc = local_energies(state, W)
        nu_s = np.sqrt(max(np.linalg.det(state.sigma[np.ix_([0, state.M], [0, state.M])]), 0.0))
        return (
            loc[sites],
            mutual_information_with(state, 0, sites),
            float(entropy_function(nu_s)),
            float(loc[0]),
            total_energy(state, V),
        )

    times = config.t_grid
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(observe, times))
    else:
        rows = [observe(t) for t in times]

    energy = np.array([r[0] for r in rows])
    energy -= energy[0]
    mi = np.array([r[1] for r in rows])
    return Trajectory(
        times=times,
        sites=sites,
        energy=energy,
        mi=mi,
        system_entropy=np.array([r[2] for r in rows]),
        system_energy=np.array([r[3] for r in rows]),
        total_energy=np.array([r[4] for r in rows]),
    )


def _arrival_time(series, times, threshold, hold):
    above = series > threshold
    if hold > 1:
        ok = np.ones(len(above) - hold + 1, dtype=bool)
        for j in range(hold):
            ok &= above[j : len(above) - hold + 1 + j]
    else:
        ok = above
    hits = np.nonzero(ok)[0]
    return times[hits[0]] if len(hits) else np.nan


def fit_front(
    traj: Trajectory, threshold: float = 0.05, hold: int = 2, min_sites: int = 10
) -> FrontFit:
    """Arrival times of I(S:n) above threshold * max_t I(S:1), fitted by a line n(t)."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    ref = traj.mi[:, traj.site_column(1)].max()
    t_arr = np.full(len(traj.sites), np.nan)
    if ref > 0:
        level = threshold * ref
        for j in range(len(traj.sites)):
            t_arr[j] = _arrival_time(traj.mi[:, j], traj.times, level, hold)
    reached = ~np.isnan(t_arr)
    n_reached = int(reached.sum())
    if n_reached < min_sites:
        return FrontFit(t_arr, traj.sites, np.nan, np.nan, np.nan, n_reached, False)
    x = t_arr[reached]
    y = traj.sites[reached].astype(float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (intercept + slope * x)) ** 2)))
    return FrontFit(t_arr, traj.sites, float(max(slope, 0.0)), float(intercept), resid, n_reached, True)


def penetration_profile(traj: Trajectory, window=(2, 20)) -> PenetrationProfile:
    """Per-site maxima over time and an exponential fit ln maxMI(n) = a - n/xi."""
    max_mi = traj.mi.max(axis=0)
    max_e = traj.energy.max(axis=0)
    lo, hi = window
    sel = (traj.sites >= lo) & (traj.sites <= hi) & (max_mi > 0)
    if sel.sum() < 2:
        return PenetrationProfile(traj.sites, max_mi, max_e, np.nan, np.nan, False)
    n = traj.sites[sel].astype(float)
    y = np.log(max_mi[sel])
    slope, a = np.polyfit(n, y, 1)
    ss_res = np.sum((y - (a + slope * n)) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = float(1 - ss_res / ss_tot) if ss_tot > 0 else np.nan
    xi = float(-1.0 / slope) if slope != 0 else np.inf
    return PenetrationProfile(traj.sites, max_mi, max_e, xi, r2, True)


def oscillation_count(series) -> int:
    """Number of sign changes of the sampled time derivative."""
    d = np.diff(np.asarray(series, dtype=float))
    d = d[d != 0]
    return int(np.count_nonzero(np.diff(np.sign(d))))


def confinement_ratio(traj: Trajectory, from_site: int = 10) -> float:
    """max_t I(S:n) over n >= from_site, relative to max_t I(S:1)."""
    peak = traj.mi.max(axis=0)
    ref = peak[traj.site_column(1)]
    far = traj.sites >= from_site
    if not far.any():
        raise ValueError(f"no observed site >= {from_site}")
    if ref == 0:
        return 0.0 if peak[far].max() == 0 else np.inf
    return float(peak[far].max() / ref)


def classify_regime(config: ScenarioConfig, traj: Trajectory) -> RegimeReport:
    front = fit_front(traj, config.front_threshold, config.front_hold, config.min_front_sites)
    ratio = confinement_ratio(traj, config.confinement_from_site)
    if front.fitted and front.n_reached >= config.ballistic_sites:
        label = "ballistic"
    elif ratio < config.confinement_ratio:
        label = "confined"
    else:
        label = "dressed-edge"
    return RegimeReport(label, oscillation_count(traj.system_entropy), ratio, front)


def light_cone_excess(traj: Trajectory, v_max: float, offset: float = 2.0) -> float:
    """Largest I(S:n)(t) outside n > offset + v_max t, relative to max I."""
    peak = traj.mi.max()
    if peak == 0:
        return 0.0
    outside = traj.sites[None, :] > offset + v_max * traj.times[:, None]
    if not outside.any():
        return 0.0
    return float(np.max(np.where(outside, traj.mi, 0.0)) / peak)
