import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerbath.chain import (
    ChainParams,
    NotPositiveDefiniteError,
    SystemParams,
    band_edges,
    build_bath_potential,
    build_full_potential,
    diagonalize,
    dispersion_closed_form,
    extended_zone_spectrum,
    group_velocity,
    max_group_velocity,
    mode_couplings,
)

REF = ChainParams(N=225, omega0=0.3, g=0.1, h=0.05)


def test_invariants_reject_bad_params():
    with pytest.raises(ValueError):
        ChainParams(N=3, omega0=0.0, g=1.0, h=0.0)
    with pytest.raises(ValueError):
        ChainParams(N=1)
    with pytest.raises(ValueError):
        ChainParams(omega0=-0.1)
    with pytest.raises(ValueError):
        ChainParams(end_correction="middle")
    with pytest.raises(ValueError):
        SystemParams(omegaS=0.0)
    with pytest.raises(ValueError):
        SystemParams(kappa=-1.0)


def test_reference_potential_first_sites():
    V = build_bath_potential(REF)
    assert V[0, 0] == pytest.approx(0.24, abs=1e-15)
    assert V[1, 1] == pytest.approx(0.24, abs=1e-15)
    assert V[0, 1] == -0.1
    assert V[1, 2] == -0.05
    assert np.array_equal(V, V.T)


def test_uniform_diagonal_with_both_corrections():
    V = build_bath_potential(ChainParams(N=225, omega0=0.3, g=0.1, h=0.05, end_correction="both"))
    assert np.allclose(np.diag(V), 0.24, atol=1e-15, rtol=0)


def test_default_correction_only_first_site():
    V = build_bath_potential(REF)
    d = np.diag(V)
    assert np.allclose(d[:-1], 0.24, atol=1e-15, rtol=0)
    # site 225 keeps only its h bond
    assert d[-1] == pytest.approx(0.09 + 0.05)


def test_monatomic_limit():
    V = build_bath_potential(ChainParams(N=4, omega0=1.0, g=0.5, h=0.5, end_correction="both"))
    assert np.allclose(np.diag(V), 2.0)
    off = V[np.triu_indices(4, 1)]
    assert np.allclose(off[off != 0], -0.5)
    assert np.count_nonzero(off) == 3


def test_bandwidth_structure():
    V = build_full_potential(REF, SystemParams(0.35, 1e-4))
    i, j = np.nonzero(V)
    assert np.all(np.abs(i - j) <= 1)


def test_full_potential_reference_entries():
    V = build_full_potential(REF, SystemParams(0.35, 1e-4))
    assert V.shape == (226, 226)
    assert V[0, 0] == pytest.approx(0.1225)
    assert V[0, 1] == V[1, 0] == -1e-4
    assert np.array_equal(V[1:, 1:], build_bath_potential(REF))


def test_zero_coupling_is_block_diagonal():
    V = build_full_potential(REF, SystemParams(0.2, 0.0))
    assert not V[0, 1:].any() and not V[1:, 0].any()


def test_strong_coupling_rejected():
    # scan kappa upward until the eigensolver sees a non-positive eigenvalue
    small = ChainParams(N=10, omega0=0.3, g=0.1, h=0.05)
    threshold = None
    for kappa in np.linspace(0.01, 1.0, 100):
        V = build_full_potential(small, SystemParams(0.2, 0.0))
        V[0, 1] = V[1, 0] = -kappa
        if np.linalg.eigvalsh(V)[0] <= 0:
            threshold = kappa
            break
    assert threshold is not None
    with pytest.raises(NotPositiveDefiniteError) as err:
        build_full_potential(small, SystemParams(0.2, threshold))
    assert err.value.smallest <= 0


def test_diagonalize_diagonal_matrix():
    m = diagonalize(np.diag([1.0, 4.0]))
    assert np.allclose(m.frequencies, [1, 2])
    assert np.allclose(m.modes, np.eye(2))


def test_diagonalize_two_by_two():
    m = diagonalize(np.array([[2.0, -1.0], [-1.0, 2.0]]))
    assert np.allclose(m.frequencies**2, [1, 3])


def test_diagonalize_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError):
        diagonalize(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_normal_modes_invariants_and_signs():
    V = build_full_potential(REF, SystemParams(0.35, 1e-4))
    m = diagonalize(V)
    O, w = m.modes, m.frequencies
    assert np.all(np.diff(w) >= 0)
    assert np.abs(O.T @ O - np.eye(len(w))).max() <= 1e-10
    assert np.abs((O * w**2) @ O.T - V).max() <= 1e-8 * np.abs(V).max()
    pivots = O[np.argmax(np.abs(O), axis=0), np.arange(len(w))]
    assert np.all(pivots > 0)
    # deterministic
    m2 = diagonalize(V)
    assert np.array_equal(m.modes, m2.modes)


def test_reference_bath_spectrum_split_by_gap():
    w = diagonalize(build_bath_potential(REF)).frequencies
    top_a, bottom_o, top_o, _ = band_edges(REF)
    acoustic = np.sum((w >= 0.3 - 1e-12) & (w <= top_a))
    optical = np.sum((w >= bottom_o * (1 - 1e-3)) & (w <= top_o))
    assert acoustic in (112, 113)
    assert acoustic + optical == 225


def test_both_correction_has_single_midgap_edge_mode():
    # sensitivity of the boundary rule: odd N ending on a weak bond
    chain = ChainParams(N=225, omega0=0.3, g=0.1, h=0.05, end_correction="both")
    m = diagonalize(build_bath_potential(chain))
    top_a, bottom_o, _, _ = band_edges(chain)
    inside = (m.frequencies > top_a * (1 + 1e-3)) & (m.frequencies < bottom_o * (1 - 1e-3))
    assert inside.sum() == 1
    w_edge = m.frequencies[inside][0]
    assert w_edge == pytest.approx(np.sqrt(0.24), rel=1e-10)
    mode = m.modes[:, np.nonzero(inside)[0][0]]
    assert abs(mode[0]) < 1e-20 and abs(mode[-1]) > 0.5
    # invisible from site 1, so the spectral density is unaffected
    g_edge = mode_couplings(m, 1e-4)[inside]
    assert abs(g_edge[0]) < 1e-24


def test_band_edges_reference_values():
    top_a, bottom_o, top_o, bottom_a = band_edges(REF)
    assert round(top_a, 3) == 0.436
    assert bottom_o == pytest.approx(0.540, abs=1.5e-3)
    assert top_o == pytest.approx(0.625, abs=1e-3)
    assert bottom_a == 0.3


def test_band_edges_monatomic_ohmic():
    g = 0.1
    top_a, bottom_o, top_o, bottom_a = band_edges(ChainParams(N=10, omega0=0.0, g=g, h=g))
    assert top_a == bottom_o == pytest.approx(np.sqrt(2 * g))
    assert top_o == pytest.approx(2 * np.sqrt(g))


def test_dispersion_reference_branch_extremes():
    k = np.linspace(1e-9, np.pi, 100001)
    ac = dispersion_closed_form(REF, "acoustic", k)
    op = dispersion_closed_form(REF, "optical", k)
    assert f"{ac.max():.3g}" == "0.436"
    assert op.min() == pytest.approx(0.540, abs=1.5e-3)
    assert op.max() == pytest.approx(0.625, abs=1e-3)
    assert ac.min() >= 0.3 - 1e-12


def test_dispersion_gap_closes_when_g_equals_h():
    chain = ChainParams(N=10, omega0=0.2, g=0.3, h=0.3)
    top = dispersion_closed_form(chain, "acoustic", np.pi / 2)
    bottom = dispersion_closed_form(chain, "optical", np.pi / 2)
    assert top == pytest.approx(bottom)
    assert top == pytest.approx(np.sqrt(0.04 + 0.6))
    # and follows the monatomic dispersion
    k = np.linspace(0.01, np.pi / 2 - 0.01, 50)
    assert np.allclose(
        dispersion_closed_form(chain, "acoustic", k) ** 2, 0.04 + 2 * 0.3 * (1 - np.cos(k))
    )


def test_dispersion_invariant_ranges():
    for g, h in [(0.1, 0.05), (0.05, 0.1), (0.3, 0.01)]:
        c = ChainParams(N=10, omega0=0.3, g=g, h=h)
        k = np.linspace(1e-6, np.pi, 2001)
        lo, hi = min(g, h), max(g, h)
        ac = dispersion_closed_form(c, "acoustic", k)
        op = dispersion_closed_form(c, "optical", k)
        assert ac.min() >= 0.3 - 1e-12 and ac.max() <= np.sqrt(0.09 + 2 * lo) + 1e-12
        assert op.min() >= np.sqrt(0.09 + 2 * hi) - 1e-12 and op.max() <= np.sqrt(0.09 + 2 * (g + h)) + 1e-12


def test_closed_form_matches_exact_spectrum():
    exact = diagonalize(build_bath_potential(REF)).frequencies
    closed = extended_zone_spectrum(REF)
    assert np.max(np.abs(closed - exact) / exact) <= 0.02


def test_group_velocity_vanishes_at_edges():
    for branch in ("acoustic", "optical"):
        for k in (1e-9, np.pi / 2, np.pi - 1e-9):
            assert group_velocity(REF, branch, k) < 1e-7


@settings(max_examples=60, deadline=None)
@given(
    k=st.floats(0.05, np.pi - 0.05),
    branch=st.sampled_from(["acoustic", "optical"]),
    g=st.floats(0.01, 1.0),
    h=st.floats(0.01, 1.0),
)
def test_group_velocity_matches_finite_differences(k, branch, g, h):
    if abs(k - np.pi / 2) < 0.05:
        k += 0.1
    c = ChainParams(N=10, omega0=0.3, g=g, h=h)
    step = 1e-6
    fd = (dispersion_closed_form(c, branch, k + step) - dispersion_closed_form(c, branch, k - step)) / (2 * step)
    v = group_velocity(c, branch, k)
    # FD truncation/roundoff floor ~1e-10 absolute
    assert abs(v - abs(fd)) <= 1e-6 * abs(fd) + 1e-9


def test_max_group_velocities_reference():
    v_ac, w_ac = max_group_velocity(REF, "acoustic")
    v_op, w_op = max_group_velocity(REF, "optical")
    # dense-grid maximisation of the finite-difference derivative
    k = np.linspace(1e-6, np.pi / 2 - 1e-6, 400001)
    for branch, v in (("acoustic", v_ac), ("optical", v_op)):
        w = dispersion_closed_form(REF, branch, k)
        fd = np.abs(np.gradient(w, k))
        assert v == pytest.approx(fd.max(), rel=1e-6)
    assert v_ac == pytest.approx(0.1296427, abs=1e-6)
    assert v_op == pytest.approx(0.0877382, abs=1e-6)
    assert v_ac > v_op
    assert 0.3 < w_ac < 0.436 and 0.54 < w_op < 0.625


def test_mode_couplings():
    m = diagonalize(build_bath_potential(REF))
    assert not mode_couplings(m, 0.0).any()
    gs = mode_couplings(m, 1e-4)
    assert len(gs) == 225
    assert np.sum(gs**2) == pytest.approx(1e-8, rel=1e-12)
