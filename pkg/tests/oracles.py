"""Independent reference computations used by several test modules."""

from functools import lru_cache

import numpy as np


def heisenberg_rk4(V, sigma0, t_checkpoints, step=1e-4):
    """Integrate d(sigma)/dt = A sigma + sigma A^T with A = [[0, 1], [-V, 0]].

    Fixed-step classical RK4; returns sigma at each checkpoint (which must be
    multiples of ``step``).
    """
    M = V.shape[0]
    A = np.block([[np.zeros((M, M)), np.eye(M)], [-V, np.zeros((M, M))]])
    At = A.T.copy()

    def f(s):
        return A @ s + s @ At

    sigma = np.array(sigma0, dtype=float)
    out = []
    t = 0.0
    n_done = 0
    for tc in t_checkpoints:
        n_target = int(round(tc / step))
        for _ in range(n_target - n_done):
            k1 = f(sigma)
            k2 = f(sigma + 0.5 * step * k1)
            k3 = f(sigma + 0.5 * step * k2)
            k4 = f(sigma + step * k3)
            sigma = sigma + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        n_done = n_target
        t = n_done * step
        out.append(sigma.copy())
    return out


@lru_cache(maxsize=None)
def small_instance_comparison():
    """Max deviation between the exact propagator and RK4 for N = 3 over t in [0, 50]."""
    from dimerbath.chain import ChainParams, SystemParams, build_full_potential, diagonalize
    from dimerbath.gaussian import evolve, propagator
    from dimerbath.simulate import ScenarioConfig, initial_state

    cfg = ScenarioConfig(
        chain=ChainParams(N=3, omega0=0.3, g=0.1, h=0.05),
        sys=SystemParams(omegaS=0.35, kappa=0.05),
        T=0.2,
        r=1.0,
    )
    V = build_full_potential(cfg.chain, cfg.sys)
    modes = diagonalize(V)
    s0 = initial_state(cfg)
    checkpoints = [5.0, 12.5, 25.0, 37.5, 50.0]
    ref = heisenberg_rk4(V, s0.sigma, checkpoints)
    worst = 0.0
    for tc, sig_ref in zip(checkpoints, ref):
        sig = evolve(s0, propagator(modes, tc)).sigma
        worst = max(worst, float(np.abs(sig - sig_ref).max()))
    return worst
