"""spectral - Fourier signature of (nonlinear) discrete derivative operators

Every Fourier mode of the periodic unit domain, discretised on 2N+1 cells, is
fed through a discrete derivative and the output is expanded back in the
real Fourier basis. Column p of the resulting matrix Omega is the expansion
of the derivative of basis function p, ordered

    1, cos(2 pi x), sin(2 pi x), cos(4 pi x), sin(4 pi x), ...

For a linear translation invariant operator Omega is 2x2 block diagonal;
anything off the diagonal blocks is spurious mode generation.
"""
import collections
import logging

import numpy as np

from . import mesh
from . import recon

logger = logging.getLogger(__name__)

DEFAULT_N = 128
MIN_N = 8

class x_spectral(Exception): pass
class x_invalid_modes(x_spectral, ValueError): pass

SpectralSignature = collections.namedtuple(
    "SpectralSignature",
    ["label", "N", "Omega", "E", "OmegaC", "abscissa", "diffusion", "dispersion", "delta", "T_k", "Tj", "T"],
)


#
# Discrete derivative operators: callables taking a periodic CellField and
# returning the (M, components) array of derivative cell values
#
def _periodic_values(field, ghost):
    "Interior values of a field re-padded with `ghost` periodic ghost cells"
    g = field.grid
    padded = mesh.CellField(mesh.make_grid(g.x_lo, g.x_hi, g.M, ghost), field.components)
    padded.values[padded.grid.interior] = field.interior
    return mesh.fill_ghosts(padded, mesh.PERIODIC).values

def upwind_fv_derivative(scheme):
    """upwind_fv_derivative - the finite volume derivative of u_t + u_x = 0

        D(u)_j = (u-_{j+1/2} - u-_{j-1/2}) / h

    where u-_{j+1/2} is the value reconstructed by `scheme` at the right
    boundary of cell j.
    """
    r = scheme.r

    def derivative(field):
        h, M, m = field.grid.h, field.grid.M, field.components
        windows = recon.stencil_windows(_periodic_values(field, r), r)
        flat = windows.transpose(0, 2, 1).reshape(-1, scheme.width)
        _, right = recon.reconstruct_boundaries(scheme, flat, h)
        upwind = right.reshape(M + 2, m)[:-1]
        return (upwind[1:] - upwind[:-1]) / h

    derivative.label = scheme.label
    return derivative

def first_order_upwind_derivative():
    "(u_j - u_{j-1}) / h"
    def derivative(field):
        values = _periodic_values(field, 1)
        return (values[1:-1] - values[:-2]) / field.grid.h
    derivative.label = "upwind1"
    return derivative

def central_derivative():
    "(u_{j+1} - u_{j-1}) / 2h"
    def derivative(field):
        values = _periodic_values(field, 1)
        return (values[2:] - values[:-2]) / (2.0 * field.grid.h)
    derivative.label = "central2"
    return derivative

def spectral_derivative():
    """Cell averages of the exact derivative of the trigonometric interpolant
    of the averages"""
    def derivative(field):
        g = field.grid
        frequencies = np.fft.fftfreq(g.M, d=1.0 / g.M)
        multiplier = 2j * np.pi * frequencies / (g.x_hi - g.x_lo)
        return np.real(np.fft.ifft(multiplier[:, None] * np.fft.fft(field.interior, axis=0), axis=0))
    derivative.label = "exact"
    return derivative


#
# Fourier expansion of cell data
#
def mode_grid(N):
    if N < MIN_N:
        raise x_invalid_modes("N = %r is below the minimum of %d modes" % (N, MIN_N))
    return mesh.make_grid(0.0, 1.0, 2 * N + 1)

def mode_averages(N):
    """mode_averages - exact cell averages of every real basis function

    Returns a (2N+1, 2N+1) array whose column p holds the averages of basis
    function p over the 2N+1 cells of the unit domain.
    """
    grid = mode_grid(N)
    edges = grid.edges
    omega = 2 * np.pi * np.arange(1, N + 1)
    #
    # Averages of cos(w x) and sin(w x) over [x_j, x_j+1] from their
    # antiderivatives sin(w x)/w and -cos(w x)/w
    #
    phase = np.outer(edges, omega)
    averages = np.empty((grid.M, grid.M))
    averages[:, 0] = 1.0
    averages[:, 1::2] = np.diff(np.sin(phase), axis=0) / (omega * grid.h)
    averages[:, 2::2] = -np.diff(np.cos(phase), axis=0) / (omega * grid.h)
    return averages

def real_coefficients(values):
    """real_coefficients - expansion of periodic cell averages in the real basis

    values has the 2N+1 cells along axis 0. The DFT coefficient of mode l is
    divided by the cell-average transfer factor e^{i pi l h} sin(pi l h)/(pi l h),
    so the averages of a trigonometric polynomial of degree N give back its
    point coefficients exactly.
    """
    values = np.asarray(values, dtype=float)
    M = values.shape[0]
    N = (M - 1) // 2
    ell = np.arange(N + 1).reshape((-1,) + (1,) * (values.ndim - 1))
    transfer = M * np.exp(1j * np.pi * ell / M) * np.sinc(ell / M)
    c = np.fft.fft(values, axis=0)[:N + 1] / transfer

    coefficients = np.empty(values.shape)
    coefficients[0] = c[0].real
    coefficients[1::2] = 2.0 * c[1:].real
    coefficients[2::2] = -2.0 * c[1:].imag
    return coefficients

def exact_matrix(N):
    "The matrix D of d/dx on the real basis: blocks 2 pi k [[0, 1], [-1, 0]]"
    D = np.zeros((2 * N + 1, 2 * N + 1))
    for k in range(1, N + 1):
        D[2 * k - 1, 2 * k] = 2 * np.pi * k
        D[2 * k, 2 * k - 1] = -2 * np.pi * k
    return D

def _block_wavenumbers(N):
    "Wavenumber k of each row/column 1 .. 2N of Omega"
    return np.repeat(np.arange(1, N + 1), 2)


def mode_amplitude(N):
    """mode_amplitude - amplitude of the modes fed to the operator

    The inverse DFT basis vector of the 2pi periodic domain, 1/(2N+1), with
    cells of width 2 pi h. On the unit domain that is h / 2pi. Indicators of
    such a mode scale like h^2, the same as eps = h^2, so the nonlinear
    weights see I / eps as a function of kh alone.
    """
    return mode_grid(N).h / (2 * np.pi)

def build_omega(op, N):
    """build_omega - the matrix of a discrete derivative in the real Fourier basis

    All 2N+1 basis functions are pushed through `op` as the components of a
    single field, each column being processed independently. Columns are
    per unit amplitude.
    """
    amplitude = mode_amplitude(N)
    grid = mode_grid(N)
    field = mesh.CellField(grid, grid.M, amplitude * mode_averages(N))
    logger.debug("Omega for %s with N=%d", getattr(op, "label", op), N)
    return real_coefficients(op(field)) / amplitude

def error_matrix(Omega, N):
    """error_matrix - E = |Omega - D| diag(1 / 2 pi k), constant mode dropped"""
    difference = np.abs(np.asarray(Omega) - exact_matrix(N))[1:, 1:]
    return difference / (2 * np.pi * _block_wavenumbers(N))[None, :]

def complex_form(Omega):
    """complex_form - Omega in the complex exponential basis and its diagonal errors

    Returns (OmegaC, diffusion, dispersion). OmegaC = T^H Omega T restricted
    to the modes e^{2 pi i k x}, k = 1..N. diffusion_k = -Re(OmegaC_kk) is the
    growth rate of mode k under u_t + D u = 0 and dispersion_k =
    Im(OmegaC_kk) - 2 pi k.
    """
    Omega = np.asarray(Omega)
    N = (Omega.shape[0] - 1) // 2
    T = np.zeros((2 * N, N), dtype=complex)
    k = np.arange(N)
    T[2 * k, k] = 1.0 / np.sqrt(2.0)
    T[2 * k + 1, k] = 1j / np.sqrt(2.0)
    OmegaC = T.conj().T @ Omega[1:, 1:] @ T
    diagonal = np.diag(OmegaC)
    return OmegaC, -diagonal.real, diagonal.imag - 2 * np.pi * np.arange(1, N + 1)

def distortion(OmegaC, N):
    "delta_k = (1/N) sum over l != k of |OmegaC_lk|"
    magnitude = np.abs(OmegaC)
    return (magnitude.sum(axis=0) - np.diag(magnitude)) / N

def temperature(OmegaC, N):
    """temperature - mode temperatures T_k, running means T_j and the scheme temperature

        T_k = (1/N^3) sum_l |OmegaC_lk| ((k - l)/pi)^2
        T_j = (1/j) sum_{l <= j} T_l
        T = T_{N/2}
    """
    k = np.arange(1, N + 1)
    weight = ((k[None, :] - k[:, None]) / np.pi) ** 2
    T_k = (np.abs(OmegaC) * weight).sum(axis=0) / N ** 3
    Tj = np.cumsum(T_k) / k
    return T_k, Tj, float(Tj[N // 2 - 1])


def signature(op, N=DEFAULT_N, label=None):
    """signature - the full spectral signature of a discrete derivative

    For a ReconScheme pass upwind_fv_derivative(scheme); its eps rule is
    evaluated with h = 1/(2N+1) on modes of amplitude mode_amplitude(N).
    """
    Omega = build_omega(op, N)
    OmegaC, diffusion, dispersion = complex_form(Omega)
    T_k, Tj, T = temperature(OmegaC, N)
    abscissa = np.pi * np.arange(1, N + 1) / N
    label = label or getattr(op, "label", "operator")
    logger.debug("%s: N=%d T=%.3e", label, N, T)
    return SpectralSignature(
        label, N, Omega, error_matrix(Omega, N), OmegaC, abscissa,
        diffusion, dispersion, distortion(OmegaC, N), T_k, Tj, T,
    )
