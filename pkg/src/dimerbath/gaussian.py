"""Gaussian states as covariance matrices in block order (q_1..q_M, p_1..p_M).

Vacuum normalization is hbar = 1: a ground-state oscillator of frequency w
has <q^2> = 1/(2w), <p^2> = w/2 and symplectic eigenvalue 1/2.
"""

from dataclasses import dataclass, field

import numpy as np

from .chain import NormalModes

#: Tolerance on nu >= 1/2 below which a state is reported unphysical.
PHYSICAL_TOL = 1e-6
#: Negative mutual information above -MI_CLIP is roundoff and clipped to 0.
MI_CLIP = 1e-9


class UnphysicalStateError(ValueError):
    """A covariance matrix violates the uncertainty relation."""


def symplectic_form(M: int) -> np.ndarray:
    """Omega = [[0, 1], [-1, 0]] in block order."""
    eye = np.eye(M)
    zero = np.zeros((M, M))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class CovarianceState:
    sigma: np.ndarray
    means: np.ndarray = field(default=None)

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
            raise ValueError(f"sigma must be a square 2M x 2M matrix, got shape {sigma.shape}")
        object.__setattr__(self, "sigma", sigma)
        if self.means is None:
            object.__setattr__(self, "means", np.zeros(sigma.shape[0]))

    @property
    def M(self) -> int:
        return self.sigma.shape[0] // 2

    def qq(self):
        return self.sigma[: self.M, : self.M]

    def pp(self):
        return self.sigma[self.M :, self.M :]

    def validate(self):
        nu = symplectic_eigenvalues(self, check=False)
        if nu[0] < 0.5 - PHYSICAL_TOL:
            raise UnphysicalStateError(
                f"smallest symplectic eigenvalue {nu[0]:.12g} < 1/2"
            )
        return self


@dataclass(frozen=True)
class SymplecticPropagator:
    S: np.ndarray
    t: float


def direct_sum(*states: CovarianceState) -> CovarianceState:
    """Product state of the given states, modes concatenated in order."""
    Ms = [s.M for s in states]
    M = sum(Ms)
    sigma = np.zeros((2 * M, 2 * M))
    offset = 0
    for s, m in zip(states, Ms):
        idx = np.r_[offset : offset + m, M + offset : M + offset + m]
        sigma[np.ix_(idx, idx)] = s.sigma
        offset += m
    return CovarianceState(sigma)


def _in_modes(O, diag_q, diag_p):
    M = O.shape[0]
    sigma = np.zeros((2 * M, 2 * M))
    sigma[:M, :M] = (O * diag_q) @ O.T
    sigma[M:, M:] = (O * diag_p) @ O.T
    return sigma


def thermal_covariance(bath_modes: NormalModes, T: float) -> CovarianceState:
    """Gibbs state of the quadratic Hamiltonian whose normal modes are given."""
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    w = bath_modes.frequencies
    if np.any(w <= 0):
        raise ValueError("all mode frequencies must be positive")
    c = 1.0 / np.tanh(w / (2 * T)) if T > 0 else np.ones_like(w)
    return CovarianceState(_in_modes(bath_modes.modes, c / (2 * w), w * c / 2))


def squeezed_vacuum_covariance(omegaS: float, r: float) -> CovarianceState:
    """Single-mode squeezed vacuum; r > 0 squeezes position."""
    if not omegaS > 0:
        raise ValueError(f"omegaS must be > 0, got {omegaS!r}")
    return CovarianceState(
        np.diag([np.exp(-2 * r) / (2 * omegaS), omegaS * np.exp(2 * r) / 2])
    )


def propagator(full_modes: NormalModes, t: float) -> SymplecticPropagator:
    """Exact phase-space flow for H = p.p/2 + q.V.q/2 after time t."""
    if not np.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    w, O = full_modes.frequencies, full_modes.modes
    c, s = np.cos(w * t), np.sin(w * t)
    C = (O * c) @ O.T
    D = (O * (s / w)) @ O.T
    E = (O * (-w * s)) @ O.T
    return SymplecticPropagator(np.block([[C, D], [E, C]]), float(t))


def evolve(state: CovarianceState, prop: SymplecticPropagator) -> CovarianceState:
    S = prop.S
    if S.shape != state.sigma.shape:
        raise ValueError(
            f"propagator shape {S.shape} does not match state shape {state.sigma.shape}"
        )
    return CovarianceState(S @ state.sigma @ S.T, S @ state.means)


def _block_indices(M, modes):
    modes = [int(m) for m in modes]
    if len(set(modes)) != len(modes):
        raise ValueError(f"mode indices must be distinct, got {modes}")
    for m in modes:
        if not 0 <= m < M:
            raise IndexError(f"mode index {m} out of range for {M} modes")
    return np.r_[modes, [m + M for m in modes]]


def reduce(state: CovarianceState, modes) -> CovarianceState:
    """Marginal on the listed modes, kept in the listed order."""
    idx = _block_indices(state.M, modes)
    return CovarianceState(state.sigma[np.ix_(idx, idx)], state.means[idx])


def _nu_from_sigma(sigma):
    """Symplectic eigenvalues of a stack of covariance matrices (..., 2m, 2m)."""
    m = sigma.shape[-1] // 2
    ev = np.linalg.eigvals(symplectic_form(m) @ sigma)
    # eigenvalues come in pairs +-i nu
    nu = np.sort(np.abs(ev.imag), axis=-1)
    return nu[..., 1::2]


def symplectic_eigenvalues(state: CovarianceState, check: bool = True) -> np.ndarray:
    """Ascending symplectic eigenvalues (moduli of the eigenvalues of i Omega sigma)."""
    nu = _nu_from_sigma(state.sigma)
    if check and nu[0] < 0.5 - PHYSICAL_TOL:
        raise UnphysicalStateError(f"smallest symplectic eigenvalue {nu[0]:.12g} < 1/2")
    return nu


def entropy_function(nu):
    """Von Neumann entropy (nats) of one mode with symplectic eigenvalue nu."""
    nu = np.maximum(np.asarray(nu, dtype=float), 0.5)
    a = nu + 0.5
    b = nu - 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(b > 0, b * np.log(np.where(b > 0, b, 1.0)), 0.0)
    return a * np.log(a) - tail


def von_neumann_entropy(state: CovarianceState) -> float:
    return float(np.sum(entropy_function(symplectic_eigenvalues(state))))


def _clip_mi(raw):
    raw = np.asarray(raw, dtype=float)
    bad = raw <= -MI_CLIP
    if np.any(bad):
        raise UnphysicalStateError(
            f"mutual information {raw[bad].min():.3g} is negative beyond roundoff"
        )
    return np.maximum(raw, 0.0)


def mutual_information(state: CovarianceState, a: int, b: int) -> float:
    """I(a:b) = S(a) + S(b) - S(a,b) in nats."""
    if a == b:
        raise ValueError("mutual information needs two distinct modes")
    joint = reduce(state, [a, b]).sigma
    if not joint[np.ix_([0, 2], [1, 3])].any():
        return 0.0
    raw = (
        von_neumann_entropy(reduce(state, [a]))
        + von_neumann_entropy(reduce(state, [b]))
        - von_neumann_entropy(reduce(state, [a, b]))
    )
    return float(_clip_mi(raw))


def mutual_information_with(state: CovarianceState, a: int, others) -> np.ndarray:
    """I(a:n) for every n in ``others``, batched over the two-mode marginals."""
    others = np.asarray(list(others), dtype=int)
    M = state.M
    if np.any(others == a):
        raise ValueError("mutual information needs two distinct modes")
    if others.size and (others.min() < 0 or others.max() >= M):
        raise IndexError(f"mode index out of range for {M} modes")
    sig = state.sigma
    qa, pa = a, a + M
    qn, pn = others, others + M
    pair = np.empty((len(others), 4, 4))
    rows = [np.full_like(others, qa), qn, np.full_like(others, pa), pn]
    for i, ri in enumerate(rows):
        for j, rj in enumerate(rows):
            pair[:, i, j] = sig[ri, rj]
    nu_pair = _nu_from_sigma(pair)
    nu_n = _nu_from_sigma(pair[:, 1::2, 1::2])
    s_a = von_neumann_entropy(reduce(state, [a]))
    raw = s_a + entropy_function(nu_n[:, 0]) - entropy_function(nu_pair).sum(axis=-1)
    if np.any(nu_pair[:, 0] < 0.5 - PHYSICAL_TOL):
        raise UnphysicalStateError("two-mode marginal violates the uncertainty relation")
    # uncorrelated marginals carry exactly zero information
    product = ~pair[:, [0, 2]][:, :, [1, 3]].any(axis=(1, 2))
    raw = np.where(product, 0.0, raw)
    return _clip_mi(raw)


def two_mode_squeezer(s: float) -> np.ndarray:
    """Symplectic matrix of two-mode squeezing with parameter s (block order)."""
    ch, sh = np.cosh(s), np.sinh(s)
    Sq = np.array([[ch, sh], [sh, ch]])
    Sp = np.array([[ch, -sh], [-sh, ch]])
    S = np.zeros((4, 4))
    S[:2, :2] = Sq
    S[2:, 2:] = Sp
    return S
