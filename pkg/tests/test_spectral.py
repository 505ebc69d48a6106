import numpy as np
import pytest

from cwenolab import mesh
from cwenolab import recon
from cwenolab import spectral

N = 16


def off_block(matrix):
    "Entries of a (2N, 2N) matrix outside the 2x2 diagonal blocks"
    k = np.repeat(np.arange(matrix.shape[0] // 2), 2)
    return matrix[k[:, None] != k[None, :]]


#
# Fourier expansion
#
def test_real_coefficients_of_mode_averages():
    np.testing.assert_allclose(spectral.real_coefficients(spectral.mode_averages(N)), np.eye(2 * N + 1), atol=1e-12)

def test_mode_grid_minimum():
    assert spectral.mode_grid(spectral.MIN_N).M == 2 * spectral.MIN_N + 1
    with pytest.raises(spectral.x_invalid_modes):
        spectral.mode_grid(4)
    with pytest.raises(spectral.x_invalid_modes):
        spectral.signature(spectral.central_derivative(), 4)

def test_exact_matrix_blocks():
    D = spectral.exact_matrix(2)
    assert D[1, 2] == pytest.approx(2 * np.pi)
    assert D[4, 3] == pytest.approx(-4 * np.pi)
    assert np.count_nonzero(D) == 4


#
# Linear operators
#
def test_exact_derivative_is_cold():
    result = spectral.signature(spectral.spectral_derivative(), N)
    assert result.label == "exact"
    np.testing.assert_allclose(result.E, 0.0, atol=1e-10)
    np.testing.assert_allclose(result.delta, 0.0, atol=1e-10)
    np.testing.assert_allclose(result.diffusion, 0.0, atol=1e-9)
    np.testing.assert_allclose(result.dispersion, 0.0, atol=1e-9)
    assert result.T == pytest.approx(0.0, abs=1e-12)

def test_central_difference_symbol():
    result = spectral.signature(spectral.central_derivative(), N)
    h = 1.0 / (2 * N + 1)
    theta = 2 * np.pi * np.arange(1, N + 1) * h
    np.testing.assert_allclose(off_block(result.Omega[1:, 1:]), 0.0, atol=1e-10)
    np.testing.assert_allclose(result.diffusion, 0.0, atol=1e-9)
    np.testing.assert_allclose(result.dispersion, np.sin(theta) / h - theta / h, atol=1e-9)
    assert result.T == pytest.approx(0.0, abs=1e-12)

def test_first_order_upwind_symbol():
    result = spectral.signature(spectral.first_order_upwind_derivative(), N)
    h = 1.0 / (2 * N + 1)
    theta = 2 * np.pi * np.arange(1, N + 1) * h
    np.testing.assert_allclose(np.diag(result.OmegaC), (1 - np.exp(-1j * theta)) / h, atol=1e-10)
    assert np.all(result.diffusion < 0)
    assert result.diffusion[0] == pytest.approx(-(2 * np.pi) ** 2 * h / 2, rel=0.01)

def test_error_matrix_scaling():
    Omega = spectral.exact_matrix(N)
    Omega[3, 4] += 1.0
    E = spectral.error_matrix(Omega, N)
    assert E.shape == (2 * N, 2 * N)
    assert E[2, 3] == pytest.approx(1 / (4 * np.pi))
    assert np.count_nonzero(E > 1e-12) == 1

def test_complex_form_of_a_rotation_block():
    Omega = np.zeros((3, 3))
    Omega[1:, 1:] = [[0.5, 2.0], [-2.0, 0.5]]
    OmegaC, diffusion, dispersion = spectral.complex_form(Omega)
    assert OmegaC[0, 0] == pytest.approx(0.5 + 2.0j)
    assert diffusion[0] == pytest.approx(-0.5)
    assert dispersion[0] == pytest.approx(2.0 - 2 * np.pi)

@pytest.mark.parametrize("order", [3, 5])
def test_linear_reconstruction_is_block_diagonal(order):
    result = spectral.signature(spectral.upwind_fv_derivative(recon.ReconScheme(recon.LINEAR, order)), N)
    np.testing.assert_allclose(off_block(result.E), 0.0, atol=1e-10)
    np.testing.assert_allclose(result.delta, 0.0, atol=1e-10)
    assert result.T == pytest.approx(0.0, abs=1e-12)
    #
    # Upwind schemes damp every mode
    #
    assert np.all(result.diffusion < 1e-10)


#
# Nonlinear operators
#
def test_operator_commutes_with_translation():
    scheme = recon.ReconScheme(recon.CWENOZ, 5)
    grid = mesh.make_grid(0, 1, 33)
    values = np.random.default_rng(3).normal(size=(33, 1))
    derivative = spectral.upwind_fv_derivative(scheme)
    shifted = derivative(mesh.CellField(grid, 1, np.roll(values, 5, axis=0)))
    np.testing.assert_allclose(shifted, np.roll(derivative(mesh.CellField(grid, 1, values)), 5, axis=0), atol=1e-12)

@pytest.mark.parametrize("family", [recon.WENO, recon.CWENO, recon.CWENOZ])
def test_nonlinear_schemes_are_warm(family):
    result = spectral.signature(spectral.upwind_fv_derivative(recon.ReconScheme(family, 3)), N)
    assert result.label == recon.ReconScheme(family, 3).label
    assert result.T > 0
    assert np.all(result.delta >= 0)
    assert result.Tj[-1] == pytest.approx(result.T_k.mean())
    np.testing.assert_allclose(result.abscissa[[0, -1]], [np.pi / N, np.pi])

#
# Temperatures at the reference resolution
#
ORDERS = (3, 5, 7, 9)
NONLINEAR = (recon.WENO, recon.CWENO, recon.CWENOZ)

def nonlinear_signature(family, order, N):
    return spectral.signature(spectral.upwind_fv_derivative(recon.ReconScheme(family, order)), N)

@pytest.fixture(scope="module")
def temperatures():
    return dict(
        ((family, order), nonlinear_signature(family, order, spectral.DEFAULT_N).T)
        for family in NONLINEAR for order in ORDERS
    )

def test_mode_amplitude_cancels_for_linear_operators():
    result = spectral.signature(spectral.first_order_upwind_derivative(), N)
    h = spectral.mode_grid(N).h
    assert spectral.mode_amplitude(N) == pytest.approx(h / (2 * np.pi))
    theta = 2 * np.pi * np.arange(1, N + 1) * h
    np.testing.assert_allclose(np.diag(result.OmegaC), (1 - np.exp(-1j * theta)) / h, atol=1e-9)

@pytest.mark.slow
@pytest.mark.parametrize("order", [5, 7, 9])
def test_cwenoz_is_the_coolest(temperatures, order):
    assert temperatures[recon.CWENOZ, order] < temperatures[recon.CWENO, order]
    assert temperatures[recon.CWENOZ, order] < temperatures[recon.WENO, order]

@pytest.mark.slow
@pytest.mark.parametrize("family", NONLINEAR)
def test_schemes_cool_down_with_order(temperatures, family):
    ladder = [temperatures[family, order] for order in ORDERS]
    assert all(hot > cold > 0 for hot, cold in zip(ladder, ladder[1:]))

@pytest.mark.slow
@pytest.mark.parametrize("family, published", [(recon.WENO, 4.60e-5), (recon.CWENO, 5.06e-5)])
def test_third_order_temperature_magnitude(temperatures, family, published):
    assert published / 10 < temperatures[family, 3] < published * 10

@pytest.mark.slow
@pytest.mark.parametrize("family", NONLINEAR)
def test_temperature_does_not_depend_on_resolution(temperatures, family):
    fine = temperatures[family, 5]
    assert nonlinear_signature(family, 5, 64).T == pytest.approx(fine, rel=0.1)
    assert nonlinear_signature(family, 5, 32).T == pytest.approx(fine, rel=0.2)

@pytest.mark.slow
def test_cwenoz_distorts_low_modes_less():
    cweno = nonlinear_signature(recon.CWENO, 5, 64)
    cwenoz = nonlinear_signature(recon.CWENOZ, 5, 64)
    low = cweno.abscissa < 0.3
    assert np.all(cwenoz.delta[low] <= cweno.delta[low] + 1e-13)
