"""Quadratic model of a system oscillator attached to an open dimer chain.

Index convention for every matrix built here: the system oscillator sits at
index 0 and bath sites 1..N follow.  The bond between sites i and i+1 carries
stiffness ``g`` for odd i and ``h`` for even i.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

Branch = Literal["acoustic", "optical"]

#: Onsite-correction rules for the two chain ends.
END_CORRECTIONS = ("first", "both", "none")


class NotPositiveDefiniteError(ValueError):
    """Raised when a potential matrix has a non-positive eigenvalue."""

    def __init__(self, smallest):
        self.smallest = float(smallest)
        super().__init__(
            f"potential matrix is not positive definite (smallest eigenvalue {self.smallest:.6g})"
        )


@dataclass(frozen=True)
class ChainParams:
    """Bath chain: N sites, onsite frequency omega0, alternating bonds g/h.

    ``end_correction`` selects which chain ends receive the onsite term of the
    missing neighbour bond:

    * ``"first"`` (default): only site 1, which gets +h.
    * ``"both"``: site 1 gets +h and site N gets the stiffness the absent bond
      N -> N+1 would carry, so every diagonal entry is omega0**2 + g + h.
    * ``"none"``: no correction.

    With odd N and g > h the ``"both"`` rule leaves the chain ending on a weak
    bond with a uniform diagonal, which pins an edge mode exactly at
    sqrt(omega0**2 + g + h) inside the gap.  ``"first"`` avoids it.
    """

    N: int = 225
    omega0: float = 0.3
    g: float = 0.1
    h: float = 0.05
    end_correction: str = "first"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        if self.omega0 < 0:
            raise ValueError(f"omega0 must be >= 0, got {self.omega0!r}")
        if not self.g > 0:
            raise ValueError(f"g must be > 0, got {self.g!r}")
        if not self.h > 0:
            raise ValueError(f"h must be > 0, got {self.h!r}")
        if self.end_correction not in END_CORRECTIONS:
            raise ValueError(
                f"end_correction must be one of {END_CORRECTIONS}, got {self.end_correction!r}"
            )

    def bond(self, i: int) -> float:
        """Stiffness of the bond between sites i and i+1 (1-based)."""
        return self.g if i % 2 == 1 else self.h


@dataclass(frozen=True)
class SystemParams:
    omegaS: float = 0.35
    kappa: float = 1e-4

    def __post_init__(self):
        if not self.omegaS > 0:
            raise ValueError(f"omegaS must be > 0, got {self.omegaS!r}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa!r}")


@dataclass(frozen=True)
class NormalModes:
    """Eigenfrequencies (ascending) and orthonormal modes, V = O diag(w**2) O^T."""

    frequencies: np.ndarray
    modes: np.ndarray

    def __len__(self):
        return len(self.frequencies)


def _check_positive_definite(V):
    smallest = np.linalg.eigvalsh(V)[0]
    if not smallest > 0:
        raise NotPositiveDefiniteError(smallest)


def build_bath_potential(chain: ChainParams) -> np.ndarray:
    """Stiffness matrix of the bath chain alone (N x N)."""
    N = chain.N
    V = np.zeros((N, N))
    for i in range(1, N):
        k = chain.bond(i)
        V[i - 1, i - 1] += k
        V[i, i] += k
        V[i - 1, i] = -k
        V[i, i - 1] = -k
    V[np.diag_indices(N)] += chain.omega0**2
    if chain.end_correction in ("first", "both"):
        # the bond preceding bond 1 (g) would be an h bond
        V[0, 0] += chain.h
    if chain.end_correction == "both":
        V[N - 1, N - 1] += chain.bond(N)
    _check_positive_definite(V)
    return V


def build_full_potential(chain: ChainParams, sys: SystemParams) -> np.ndarray:
    """Stiffness matrix of system + bath ((N+1) x (N+1)), system at index 0."""
    Vb = build_bath_potential(chain)
    V = np.zeros((chain.N + 1, chain.N + 1))
    V[1:, 1:] = Vb
    V[0, 0] = sys.omegaS**2
    V[0, 1] = V[1, 0] = -sys.kappa
    _check_positive_definite(V)
    return V


def diagonalize(V: np.ndarray) -> NormalModes:
    """Exact normal modes of a symmetric positive-definite potential matrix.

    Eigenvectors are sign-fixed so that each one's largest-magnitude entry is
    positive, making the output deterministic.
    """
    V = np.asarray(V, dtype=float)
    try:
        lam, O = np.linalg.eigh(V)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    if not lam[0] > 0:
        raise NotPositiveDefiniteError(lam[0])
    pivot = np.argmax(np.abs(O), axis=0)
    signs = np.sign(O[pivot, np.arange(O.shape[1])])
    O = O * signs
    return NormalModes(frequencies=np.sqrt(lam), modes=O)


def _root(chain, k):
    g, h = chain.g, chain.h
    return np.sqrt(g * g + h * h + 2 * g * h * np.cos(2 * k))


def dispersion_closed_form(chain: ChainParams, branch: Branch, k):
    """Closed dimer-chain dispersion.

    ``k`` is the wavenumber per site, so the cell momentum is 2k and each
    branch is traversed once on (0, pi/2] and again, mirrored, on [pi/2, pi].
    """
    sign = _branch_sign(branch)
    k = np.asarray(k, dtype=float)
    return np.sqrt(chain.omega0**2 + chain.g + chain.h + sign * _root(chain, k))


def group_velocity(chain: ChainParams, branch: Branch, k):
    """|d omega / dk| in sites per unit time."""
    sign = _branch_sign(branch)
    k = np.asarray(k, dtype=float)
    R = _root(chain, k)
    w = dispersion_closed_form(chain, branch, k)
    # d(w^2)/dk = -sign * 2gh sin(2k) / R
    dw2 = -sign * 2 * chain.g * chain.h * np.sin(2 * k) / R
    return np.abs(dw2 / (2 * w))


def max_group_velocity(chain: ChainParams, branch: Branch, points: int = 200001):
    """Largest group velocity on a branch and the frequency where it occurs."""
    k = np.linspace(0.0, np.pi / 2, points)[1:-1]
    v = group_velocity(chain, branch, k)
    i = int(np.argmax(v))
    # polish the grid maximum
    lo, hi = k[max(i - 1, 0)], k[min(i + 1, len(k) - 1)]
    res = minimize_scalar(
        lambda x: -group_velocity(chain, branch, x), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12},
    )
    kbest = res.x if -res.fun >= v[i] else k[i]
    return float(group_velocity(chain, branch, kbest)), float(
        dispersion_closed_form(chain, branch, kbest)
    )


def _branch_sign(branch):
    if branch == "acoustic":
        return -1.0
    if branch == "optical":
        return 1.0
    raise ValueError(f"branch must be 'acoustic' or 'optical', got {branch!r}")


def band_edges(chain: ChainParams):
    """(acoustic_top, optical_bottom, optical_top, acoustic_bottom)."""
    w02 = chain.omega0**2
    lo, hi = min(chain.g, chain.h), max(chain.g, chain.h)
    return (
        float(np.sqrt(w02 + 2 * lo)),
        float(np.sqrt(w02 + 2 * hi)),
        float(np.sqrt(w02 + 2 * (chain.g + chain.h))),
        float(chain.omega0),
    )


def extended_zone_spectrum(chain: ChainParams):
    """Closed-form frequencies on the open-chain standing-wave grid.

    Uses k_m = pi m / (N + 1), m = 1..N, with the acoustic branch for
    k <= pi/2 and the optical branch above, returned sorted.
    """
    N = chain.N
    k = np.pi * np.arange(1, N + 1) / (N + 1)
    w = np.where(
        k <= np.pi / 2,
        dispersion_closed_form(chain, "acoustic", k),
        dispersion_closed_form(chain, "optical", k),
    )
    return np.sort(w)


def mode_couplings(bath_modes: NormalModes, kappa: float) -> np.ndarray:
    """System coupling to each bath eigenmode, g_i = kappa * O[site 1, i]."""
    return kappa * bath_modes.modes[0, :]
