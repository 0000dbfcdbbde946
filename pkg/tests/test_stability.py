import math

import numpy as np
import pytest

from activeflux.operators import SchemeVariant
from activeflux.stability import (
    STABILITY_SLACK,
    assemble_g_1d,
    assemble_g_2d,
    characteristic_coefficients_1d,
    diffusion_matrix,
    eigen_diagnostics_1d,
    max_cfl_1d,
    rk_stability_matrix,
    spectral_radius,
    stability_region_2d,
    xi_samples,
)

VARIANTS = list(SchemeVariant)


def r_poly(z, p):
    return sum(z**k / math.factorial(k) for k in range(p + 1))


def power_iteration_dominant(M, squarings=80):
    """Dominant eigenvalue by repeated squaring of the normalised power matrix."""
    P = M.copy()
    for _ in range(squarings):
        P = P @ P
        P /= np.linalg.norm(P)
    col = np.argmax(np.linalg.norm(P, axis=0))
    v = P[:, col]
    return (v.conj() @ M @ v) / (v.conj() @ v), v


def spectral_radius_oracle(M):
    """Power iteration, then one Wielandt deflation to confirm the runner-up is smaller."""
    lam1, v = power_iteration_dominant(M)
    w = M.conj().T
    _, u = power_iteration_dominant(w)
    D = M - lam1 * np.outer(v, u.conj()) / (u.conj() @ v)
    lam2, _ = power_iteration_dominant(D)
    assert abs(lam2) <= abs(lam1) * (1 + 1e-9)
    return abs(lam1)


@pytest.mark.parametrize("variant", ["central4", "central3"])
def test_zero_symbol_gives_zero_matrix(variant):
    assert np.all(np.abs(assemble_g_1d(variant, 0.0)) < 1e-15)


@pytest.mark.parametrize("variant", VARIANTS)
def test_zero_symbol_annihilates_constants(variant):
    # one-sided stencils see an average/point mismatch even at xi = 0,
    # but a constant state (equal average and point value) never moves
    G0 = assemble_g_1d(variant, 0.0)
    assert np.all(np.abs(G0 @ np.ones(2)) < 1e-14)


def test_central4_at_pi():
    np.testing.assert_allclose(assemble_g_1d("central4", np.pi), np.diag([-8.0, -8.0]), atol=1e-14)


def test_characteristic_polynomial_coefficients():
    xi = xi_samples(401)
    c1, c2 = characteristic_coefficients_1d(xi)
    np.testing.assert_allclose(c2.real, 64 * np.sin(xi / 2) ** 4, atol=1e-12)
    np.testing.assert_allclose(np.abs(c1), 2 * (9 + np.cos(xi)) * np.sin(xi / 2) ** 2, atol=1e-12)
    assert np.max(np.abs(c1.imag)) < 1e-12 and np.max(np.abs(c2.imag)) < 1e-12


def test_1d_eigenvalues_real_and_nonpositive():
    G = assemble_g_1d("central4", xi_samples(1001))
    lam = np.linalg.eigvals(G)
    assert np.max(np.abs(lam.imag)) <= 1e-10
    assert np.max(lam.real) <= 1e-12


@pytest.mark.parametrize("variant", VARIANTS)
def test_semidiscrete_stability_1d(variant):
    lam = np.linalg.eigvals(assemble_g_1d(variant, xi_samples(400)))
    assert np.max(lam.real) <= 1e-12


@pytest.mark.parametrize("theta", [0.0, np.pi / 12, np.pi / 6, np.pi / 4, 1.0])
@pytest.mark.parametrize("ab", [(1.0, 0.0), (0.0, 1.0), (0.3, 0.7), (1.0, 1.0)])
def test_semidiscrete_stability_2d(theta, ab):
    s = xi_samples(24)
    X1, X2 = np.meshgrid(s, s, indexing="ij")
    lam = np.linalg.eigvals(assemble_g_2d(*ab, theta, X1, X2))
    assert np.max(lam.real) <= 1e-12


def test_2d_zero_symbol_and_isotropy():
    assert np.max(np.abs(assemble_g_2d(0.4, 0.9, 0.3, 0.0, 0.0))) < 1e-15
    xi1, xi2 = 0.7, -1.9
    ref = assemble_g_2d(0.5, 0.5, 0.0, xi1, xi2)
    for th in (0.2, 1.0, np.pi / 4, 2.5):
        np.testing.assert_allclose(assemble_g_2d(0.5, 0.5, th, xi1, xi2), ref, atol=1e-14)


def test_2d_reduction_theta_zero_xi2_zero():
    from activeflux.stability import _g2d_blocks

    for xi in (0.3, 1.4, np.pi):
        tx = np.exp(1j * xi)
        G1, G2, G3, G4 = _g2d_blocks(tx, 1.0)
        assert np.max(np.abs(G2)) < 1e-15 and np.max(np.abs(G3)) < 1e-15 and np.max(np.abs(G4)) < 1e-15
        for b in (0.0, 0.4, 2.0):
            np.testing.assert_allclose(assemble_g_2d(0.8, b, 0.0, xi, 0.0), 0.8 * G1, atol=1e-14)


def test_diffusion_matrix_congruence():
    A = diffusion_matrix(0.2, 0.9, 0.4)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(A)), [0.2, 0.9], atol=1e-14)
    np.testing.assert_allclose(A, A.T)
    with pytest.raises(ValueError):
        assemble_g_2d(-0.1, 0.2, 0.0, 0.1, 0.1)


def test_rk_stability_matrix_examples():
    G = np.diag([-8.0, -8.0]).astype(complex)
    np.testing.assert_allclose(rk_stability_matrix(G, 3, 0.0), np.eye(2))
    M = rk_stability_matrix(G, 3, 0.27)
    z = -2.16
    assert M[0, 0].real == pytest.approx(1 + z + z**2 / 2 + z**3 / 6, rel=1e-14)
    assert M[0, 0].real == pytest.approx(-0.506816, abs=1e-12)
    assert abs(M[0, 1]) == 0
    for p in (3, 4):
        for lam in (-1.5, 0.3 + 2j):
            assert rk_stability_matrix(np.array([[lam]]), p, 0.4)[0, 0] == pytest.approx(r_poly(0.4 * lam, p))
    with pytest.raises(ValueError):
        rk_stability_matrix(G, 2, 0.1)


def test_spectral_radius_examples():
    assert spectral_radius(np.eye(2)) == pytest.approx(1.0)
    assert spectral_radius(np.diag([-0.32875, -0.32875])) == pytest.approx(0.32875)
    with pytest.raises(ValueError):
        spectral_radius(np.ones((2, 3)))


def test_spectral_radius_against_power_iteration():
    rng = np.random.default_rng(2024)
    mats = rng.normal(size=(100, 4, 4)) + 1j * rng.normal(size=(100, 4, 4))
    got = spectral_radius(mats)
    for M, r in zip(mats, got):
        assert r == pytest.approx(spectral_radius_oracle(M), abs=1e-9)


def test_spectral_radius_double_eigenvalue_is_accurate():
    # G(pi) has a double eigenvalue; the stability threshold needs it to ~1e-12
    M = rk_stability_matrix(assemble_g_1d("central4", np.pi), 3, 0.27)
    assert spectral_radius(M) == pytest.approx(abs(r_poly(-2.16, 3)), abs=1e-13)


@pytest.mark.parametrize(
    "variant,rk,lo,hi",
    [("central4", 3, 0.27, 0.28), ("alternating4", 3, 0.24, 0.25), ("central3", 3, 0.15, 0.16),
     ("alternating3", 3, 0.06, 0.07)],
)
def test_max_cfl_1d(variant, rk, lo, hi):
    assert lo <= max_cfl_1d(variant, rk) < hi


def test_max_cfl_needs_enough_samples():
    with pytest.raises(ValueError):
        max_cfl_1d("central4", 3, n_xi=100)


def test_rk4_limit_matches_real_axis_bound():
    # the most negative eigenvalue of G is -9 (where c1 is largest); RK4's real-axis
    # stability interval ends near -2.7853, which fixes the limit independently
    lam = np.linalg.eigvals(assemble_g_1d("central4", xi_samples(4001))).real
    assert lam.min() == pytest.approx(-9.0, abs=1e-5)
    z = np.linspace(-2.8, -2.77, 30001)
    edge = z[np.abs(r_poly(z, 4)) <= 1.0].min()
    assert max_cfl_1d("central4", 4) == pytest.approx(-edge / 9.0, abs=2e-4)


@pytest.mark.parametrize("variant", VARIANTS)
def test_monotone_onset(variant):
    nu = max_cfl_1d(variant, 3)
    G = assemble_g_1d(variant, xi_samples(400))
    rho = spectral_radius(rk_stability_matrix(G, 3, nu))
    assert abs(rho.max() - 1.0) <= 1e-6
    assert spectral_radius(rk_stability_matrix(G, 3, nu + 1e-4)).max() > 1 + STABILITY_SLACK


def test_stability_region_examples():
    reg = stability_region_2d(3, nu_values=[0.0, 0.15, 0.3], symbol_samples=12)
    assert reg.stable.shape == (4, 3, 3)
    assert np.all(reg.stable[:, 0, 0])
    assert np.all(reg.stable[:, 1, 1])
    assert not np.all(reg.stable[:, 2, 2])
    rows = list(reg.rows())
    assert len(rows) == 36 and rows[0] == (0.0, 0.0, 0.0, True)
    with pytest.raises(ValueError):
        stability_region_2d(3, symbol_samples=5)


def test_eigen_diagnostics_identifies_physical_root():
    d = eigen_diagnostics_1d(0.3, a=1.0, dx=0.1)
    omega = 3.0
    assert abs(d.lambda1 + omega**2) < abs(d.lambda2 + omega**2)
    assert d.lambda2.real < -2 * omega**2
    assert d.projections_available
    np.testing.assert_allclose(d.V1 + d.V2, d.u0_hat, atol=1e-14)
    assert d.lambda1.real <= 0 and d.lambda2.real <= 0


def test_eigen_diagnostics_degenerate_at_pi():
    d = eigen_diagnostics_1d(np.pi)
    assert not d.projections_available
    assert d.lambda1 == pytest.approx(-8.0) and d.lambda2 == pytest.approx(-8.0)
