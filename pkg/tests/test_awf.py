"""Spin Wigner function: multipole expansion, quadrature, diagnostics.

Ordered from closed forms upward: T_KQ against 3j closed forms, the J=1/2
Wigner function against a two-term hand sum, then the quadrature identities
(normalization, Parseval/purity) that tie the grid machinery to the
operator algebra, and finally the grid-level metric plumbing on manufactured
arrays where every number is hand-checkable.
"""

import math

import numpy as np
import pytest

from dickesim.awf import (
    MultipoleCoeffs,
    WignerGrid,
    make_grid,
    mirror_asymmetry,
    multipole_coeffs,
    multipole_operator,
    negativity_metrics,
    structure_metrics,
    wigner_on_grid,
)
from dickesim.evolve import reduce_atomic
from dickesim.states import spin_coherent_amplitudes


def random_density(width: int, rng) -> np.ndarray:
    a = rng.normal(size=(width, width)) + 1j * rng.normal(size=(width, width))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def spin_density(w: complex, J: float) -> np.ndarray:
    amps = spin_coherent_amplitudes(w, J)
    return np.outer(amps, amps.conj())


# ---------------------------------------------------------------- operators


def test_t00_is_scaled_identity():
    for J in (0.5, 1.0, 10.5):
        width = int(round(2 * J)) + 1
        t = multipole_operator(0, 0, J)
        assert np.allclose(t, np.eye(width) / math.sqrt(width), atol=1e-14)


def test_t10_is_scaled_jz():
    J = 10.5
    m = np.arange(int(2 * J) + 1) - J
    t = multipole_operator(1, 0, J)
    scale = math.sqrt(3.0 / ((2 * J + 1) * (J + 1) * J))
    assert np.allclose(t, scale * np.diag(m), atol=1e-14)


def test_multipole_adjoint_symmetry():
    # T_KQ^dagger = (-1)^Q T_{K,-Q}
    J = 2.5
    for K in range(int(2 * J) + 1):
        for Q in range(-K, K + 1):
            t = multipole_operator(K, Q, J)
            t_neg = multipole_operator(K, -Q, J)
            assert np.allclose(t.conj().T, (-1) ** Q * t_neg, atol=1e-13)


def test_multipole_orthonormality_at_paper_spin():
    J = 10.5
    ops = [
        multipole_operator(K, Q, J).ravel()
        for K in range(int(2 * J) + 1)
        for Q in range(-K, K + 1)
    ]
    a = np.array(ops)
    gram = a.conj() @ a.T  # Tr(T^dag T') since the operators are real
    assert float(np.max(np.abs(gram - np.eye(len(ops))))) < 1e-11


def test_multipole_operator_validation():
    with pytest.raises(ValueError):
        multipole_operator(23, 0, 10.5)
    with pytest.raises(ValueError):
        multipole_operator(2, 3, 10.5)
    with pytest.raises(ValueError):
        multipole_operator(1, 0, 0.3)


# ------------------------------------------------------------- coefficients


def test_coeffs_maximally_mixed():
    width = 8
    c = multipole_coeffs(np.eye(width) / width)
    assert c.coeff(0, 0) == pytest.approx(1 / math.sqrt(width), abs=1e-14)
    dense = c.c.copy()
    dense[0, c.two_j] = 0.0
    assert np.max(np.abs(dense)) < 1e-14


def test_coeffs_stretched_state_axial():
    J = 3.0
    rho = spin_density(0.0, J)  # |J,-J>
    c = multipole_coeffs(rho)
    for K in range(int(2 * J) + 1):
        for Q in range(-K, K + 1):
            val = c.coeff(K, Q)
            if Q == 0:
                assert abs(val.imag) < 1e-14
            else:
                assert abs(val) < 1e-14
    with pytest.raises(ValueError):
        c.coeff(0, 1)
    with pytest.raises(ValueError):
        multipole_coeffs(np.zeros((3, 4)))


def test_parseval_equals_purity():
    rng = np.random.default_rng(11)
    for width in (2, 5, 22):
        for _ in range(5):
            rho = random_density(width, rng)
            c = multipole_coeffs(rho)
            assert float(np.sum(np.abs(c.c) ** 2)) == pytest.approx(
                float(np.trace(rho @ rho).real), abs=1e-10
            )


# ------------------------------------------------------------------- wigner


def test_spin_half_closed_form():
    grid = make_grid(64, 16)
    rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)  # |1/2,-1/2>
    w = wigner_on_grid(multipole_coeffs(rho), grid)
    expected = (1.0 - math.sqrt(3.0) * np.cos(grid.thetas)) / (4 * math.pi)
    assert np.max(np.abs(w.values - expected[:, None])) < 1e-12
    assert np.max(w.values) == pytest.approx((1 + math.sqrt(3)) / (4 * math.pi), abs=1e-3)
    assert grid.thetas[np.argmax(w.values.max(axis=1))] == grid.thetas[-1]
    neg = negativity_metrics(w)
    assert neg.min_value < 0
    assert neg.min_value == pytest.approx(
        (1 - math.sqrt(3) * math.cos(grid.thetas[0])) / (4 * math.pi), abs=1e-12
    )


def test_south_pole_coherent_axially_symmetric():
    grid = make_grid(64, 32)
    w = wigner_on_grid(multipole_coeffs(spin_density(0.0, 10.5)), grid)
    assert np.max(np.abs(w.values - w.values[:, :1])) < 1e-12
    assert np.argmax(w.values[:, 0]) == len(grid.thetas) - 1  # toward theta = pi


def test_normalization_and_purity_quadrature():
    grid = make_grid(128, 64)
    rng = np.random.default_rng(5)
    for width in (2, 9, 22):
        J = (width - 1) / 2
        for _ in range(4):
            rho = random_density(width, rng)
            w = wigner_on_grid(multipole_coeffs(rho), grid)
            total = float(np.sum(w.weights * w.values))
            assert total == pytest.approx(1.0, abs=1e-8)
            overlap = 4 * math.pi / (2 * J + 1) * float(np.sum(w.weights * w.values**2))
            assert overlap == pytest.approx(float(np.trace(rho @ rho).real), abs=1e-8)


def test_linearity_of_mixture():
    grid = make_grid(48, 24)
    rng = np.random.default_rng(17)
    r1, r2 = random_density(6, rng), random_density(6, rng)
    lam = 0.3
    w1 = wigner_on_grid(multipole_coeffs(r1), grid).values
    w2 = wigner_on_grid(multipole_coeffs(r2), grid).values
    wmix = wigner_on_grid(multipole_coeffs(lam * r1 + (1 - lam) * r2), grid).values
    assert np.max(np.abs(wmix - (lam * w1 + (1 - lam) * w2))) < 1e-12


def test_rotation_covariance_and_phi0_equivalence():
    """z-rotation of the state, phi shift of the function, and the phi0
    display-frame factor are all the same operation."""
    J = 10.5
    n_phi = 256
    grid = make_grid(96, n_phi)
    rho = spin_density(0.45 + 0.2j, J)
    steps = 17
    gamma = steps * 2 * math.pi / n_phi
    m = np.arange(int(2 * J) + 1) - J
    u = np.exp(-1j * gamma * m)
    rho_rot = (u[:, None] * rho) * u.conj()[None, :]

    w0 = wigner_on_grid(multipole_coeffs(rho), grid).values
    w_rot = wigner_on_grid(multipole_coeffs(rho_rot), grid).values
    w_frame = wigner_on_grid(multipole_coeffs(rho), grid, phi0=gamma).values

    # W'(theta, phi) = W(theta, phi + gamma), exactly on the uniform grid
    assert np.max(np.abs(w_rot - np.roll(w0, -steps, axis=1))) < 1e-12
    assert np.max(np.abs(w_frame - w_rot)) < 1e-12


def test_imaginary_residue_guard():
    grid = make_grid(16, 8)
    rho = np.triu(np.ones((4, 4), dtype=complex))  # not Hermitian
    rho /= np.trace(rho)
    with pytest.raises(RuntimeError, match="residue"):
        wigner_on_grid(multipole_coeffs(rho), grid)


def test_grid_validation():
    with pytest.raises(ValueError):
        make_grid(1, 8)
    g = make_grid(8, 8)
    assert float(np.sum(g.weights)) == pytest.approx(4 * math.pi, abs=1e-12)


# ---------------------------------------------------------------- metrics


def flat_grid(values: np.ndarray) -> WignerGrid:
    """Wrap a value array with unit weights and a negation-closed phi axis."""
    n_t, n_p = values.shape
    thetas = np.linspace(0.5, 2.5, n_t)
    phis = -math.pi + 2 * math.pi * np.arange(n_p) / n_p
    return WignerGrid(
        thetas=thetas, phis=phis, values=values, weights=np.ones_like(values)
    )


def test_negativity_metrics_hand_grid():
    vals = np.zeros((3, 4))
    vals[0, 0] = 2.0
    vals[1, 2] = -0.5
    vals[2, 3] = -0.25
    m = negativity_metrics(flat_grid(vals))
    assert m.min_value == -0.5
    assert m.depth_fraction == 0.25
    assert m.negative_solid_angle == 2.0  # two unit-weight cells


def test_negativity_coherent_state_nearly_positive():
    grid = make_grid(96, 96)
    w = wigner_on_grid(multipole_coeffs(spin_density(0.66, 10.5)), grid)
    assert negativity_metrics(w).depth_fraction < 0.01


def test_structure_components_and_wraparound():
    vals = np.zeros((4, 8))
    # one blob straddling the periodic phi seam...
    vals[1, 7] = 1.0
    vals[1, 0] = 0.9
    # ...and a second, separate one
    vals[3, 3] = 0.8
    vals[3, 4] = 0.7
    m = structure_metrics(flat_grid(vals), alpha=0.5)
    assert m.n_components == 2
    assert m.smallest_solid_angle == 2.0
    assert math.isnan(m.reference_solid_angle)
    # alpha above the secondary features leaves one cell
    m2 = structure_metrics(flat_grid(vals), alpha=0.95)
    assert m2.n_components == 1
    assert m2.smallest_solid_angle == 1.0
    # negative lobes count via |W|
    vals_neg = vals.copy()
    vals_neg[3, 3] = -0.8
    assert structure_metrics(flat_grid(vals_neg), alpha=0.5).n_components == 2
    with pytest.raises(ValueError):
        structure_metrics(flat_grid(vals), alpha=1.5)


def test_structure_reference_ratio():
    vals = np.zeros((4, 8))
    vals[1, 1:4] = 1.0
    ref = np.zeros((4, 8))
    ref[2, 0:6] = 1.0
    m = structure_metrics(flat_grid(vals), alpha=0.5, reference=flat_grid(ref))
    assert m.smallest_solid_angle == 3.0
    assert m.reference_solid_angle == 6.0


def test_mirror_asymmetry_exact_cases():
    n_p = 16
    phis = -math.pi + 2 * math.pi * np.arange(n_p) / n_p
    sym = np.tile(np.cos(phis), (3, 1))
    anti = np.tile(np.sin(phis), (3, 1))
    base = flat_grid(sym)
    assert mirror_asymmetry(base) == pytest.approx(0.0, abs=1e-12)
    # W = sin(phi) reflects to -W: difference 2|sin|, scale max|sin|
    g = flat_grid(anti)
    assert mirror_asymmetry(g) == pytest.approx(2.0, abs=1e-12)
    bad = WignerGrid(
        thetas=base.thetas, phis=base.phis + 0.03, values=sym, weights=base.weights
    )
    with pytest.raises(ValueError):
        mirror_asymmetry(bad)


def test_initial_packet_metrics(initial_states):
    """The I1 starting packet: symmetric single blob with the documented
    height and latitude."""
    st = initial_states["I1"]
    grid = make_grid(128, 256)
    rho = reduce_atomic(st["psi0"], st["basis"])
    phi0 = math.atan2(st["w"].imag, st["w"].real)
    w = wigner_on_grid(multipole_coeffs(rho), grid, phi0=phi0)
    assert mirror_asymmetry(w) < 1e-10
    assert structure_metrics(w, alpha=0.5).n_components == 1
    peak = float(np.max(w.values))
    theta_at_peak = grid.thetas[np.unravel_index(np.argmax(w.values), w.values.shape)[0]]
    assert peak == pytest.approx(3.5, abs=0.2)
    assert theta_at_peak == pytest.approx(0.64 * math.pi, abs=0.02 * math.pi)
