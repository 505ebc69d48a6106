"""recon - WENO, CWENO and CWENOZ reconstruction from cell averages

All polynomials live in the local basis xi = (x - x_0)/h of the
reconstruction cell, which spans xi in [-1/2, 1/2]. A stencil window is the
2r-1 averages u_{-r+1} .. u_{r-1} centred on that cell. The vectorised
functions take an (n, 2r-1) array of windows and work on every cell at once;
the single-window functions wrap them for diagnostics and tests.
"""
import collections
import functools
import logging
import math

import numpy as np
import sympy
from numpy.polynomial import Polynomial
from numpy.lib.stride_tricks import sliding_window_view

logger = logging.getLogger(__name__)

WENO = "weno"
CWENO = "cweno"
CWENOZ = "cwenoz"
LINEAR = "linear"
FAMILIES = (WENO, CWENO, CWENOZ, LINEAR)

STANDARD = "standard"
OPTIMAL = "optimal"
TAU_VARIANTS = (STANDARD, OPTIMAL)

DIRECT = "direct"
BILINEAR = "bilinear"

DEFAULT_EPS_RULE = (1.0, 2.0)

class x_recon(Exception): pass
class x_invalid_scheme(x_recon, ValueError): pass
class x_no_positive_weights(x_recon): pass
class x_unsupported_order(x_recon): pass

#
# Global smoothness indicators: tau is the absolute value of the signed
# combination of I_1 .. I_r, together with its leading power of h
#
TAU_COMBINATIONS = {
    STANDARD : {
        3 : ((1, 0, -1), 5),
        4 : ((1, -1, -1, 1), 6),
        5 : ((1, 0, 0, 0, -1), 7),
        6 : ((1, -1, 0, 0, -1, 1), 8),
    },
    OPTIMAL : {
        2 : ((1, -1), 3),
        3 : ((1, 0, -1), 5),
        4 : ((1, 3, -3, -1), 7),
        5 : ((1, 2, -6, 2, 1), 8),
        6 : ((1, 1, -8, 8, -1, -1), 9),
    },
}

WeightSet = collections.namedtuple("WeightSet", ["omega", "indicators", "tau"])
StencilOperators = collections.namedtuple("StencilOperators", ["local", "sub", "opt"])


class SmoothnessMatrix(collections.namedtuple("SmoothnessMatrix", ["q", "C"])):
    """The exact matrix C of I[P] = <w, C w> for polynomials of degree q

    C is a tuple of rows of sympy Rationals; w_i = i! a_i for the xi-basis
    coefficients a_i, i = 1..q.
    """
    __slots__ = ()

    def as_array(self):
        return np.array([[float(c) for c in row] for row in self.C])


class ReconScheme(object):
    """A configured reconstruction operator

    Parameters:
        family - one of weno, cweno, cwenoz, linear
        order - formal order 2r-1 (3, 5, 7, 9, ...)
        d0 - weight of the central polynomial P_0 (CWENO / CWENOZ / linear);
            the remaining 1-d0 is split equally over d_1..d_r
        d - explicit (d_0, ..., d_r), overriding d0
        eps_rule - (c, p) giving eps = c * h**p
        t - exponent of the nonlinear weights
        tau_variant - standard or optimal global smoothness indicator (CWENOZ)

    Linear weights of WENO depend on the reconstruction point and are
    computed on demand; `d` is None for that family. A scheme is not
    modified after construction.
    """

    def __init__(self, family, order, d0=0.5, d=None, eps_rule=DEFAULT_EPS_RULE, t=2.0, tau_variant=OPTIMAL):
        family = family.lower()
        if family not in FAMILIES:
            raise x_invalid_scheme("Unknown reconstruction family %r" % family)
        if order < 3 or order % 2 == 0:
            raise x_invalid_scheme("Order must be odd and at least 3, not %r" % order)
        if tau_variant not in TAU_VARIANTS:
            raise x_invalid_scheme("Unknown tau variant %r" % tau_variant)
        r = (order + 1) // 2

        if family == WENO:
            d = None
        else:
            if d is None:
                if not 0 < d0 < 1:
                    raise x_invalid_scheme("d0 = %r is not in (0, 1)" % d0)
                d = (d0,) + tuple((1.0 - d0) / r for _ in range(r))
            d = tuple(float(dk) for dk in d)
            if len(d) != r + 1:
                raise x_invalid_scheme("Order %d needs %d linear weights, not %d" % (order, r + 1, len(d)))
            if not all(0 < dk < 1 for dk in d):
                raise x_invalid_scheme("Linear weights %s are not all in (0, 1)" % (d,))
            if abs(sum(d) - 1.0) > 1e-14:
                raise x_invalid_scheme("Linear weights %s do not sum to 1" % (d,))

        if family == CWENOZ and r not in TAU_COMBINATIONS[tau_variant]:
            raise x_unsupported_order("No %s tau is defined for CWENOZ of order %d" % (tau_variant, order))

        c, p = eps_rule
        if not c > 0:
            raise x_invalid_scheme("eps coefficient must be positive, not %r" % c)
        if not t >= 1:
            raise x_invalid_scheme("Weight exponent t = %r is below 1" % t)

        self.family = family
        self.r = r
        self.d = d
        self.eps_rule = (float(c), float(p))
        self.t = float(t)
        self.tau_variant = tau_variant

    def __repr__(self):
        return "<ReconScheme %s>" % self.label

    @property
    def order(self):
        return 2 * self.r - 1

    @property
    def label(self):
        return "%s%d" % (self.family, self.order)

    @property
    def width(self):
        "Number of averages in a reconstruction window"
        return 2 * self.r - 1

    def eps(self, h):
        c, p = self.eps_rule
        return c * h ** p


#
# Exact stencil algebra
#
_xi = sympy.Symbol("xi")

def _cell_moment(j, l):
    "Average of xi**l over cell j, ie over [j - 1/2, j + 1/2]"
    return sympy.integrate(_xi ** l, (_xi, sympy.Rational(2 * j - 1, 2), sympy.Rational(2 * j + 1, 2)))

@functools.lru_cache(maxsize=None)
def _rational_operators(r):
    """Exact maps from averages to xi-coefficients

    Returns (local, opt) where local[k-1] is the r x r inverse for the
    substencil S_k = {-r+k, ..., k-1} and opt the (2r-1) x (2r-1) inverse
    for the full stencil, all sympy matrices of Rationals.
    """
    local = []
    for k in range(1, r + 1):
        cells = range(-r + k, k)
        local.append(sympy.Matrix([[_cell_moment(j, l) for l in range(r)] for j in cells]).inv())
    cells = range(-r + 1, r)
    opt = sympy.Matrix([[_cell_moment(j, l) for l in range(2 * r - 1)] for j in cells]).inv()
    return local, opt

@functools.lru_cache(maxsize=None)
def stencil_operators(r):
    """Float stencil operators for substencil width r

    local - (r, r, r): coefficients of P_k from its own r averages
    sub - (r, r, 2r-1): coefficients of P_k from the full window
    opt - (2r-1, 2r-1): coefficients of P_opt from the full window
    """
    local_q, opt_q = _rational_operators(r)
    local = np.array([inverse.tolist() for inverse in local_q], dtype=float)
    sub = np.zeros((r, r, 2 * r - 1))
    for k in range(1, r + 1):
        sub[k - 1][:, k - 1:k - 1 + r] = local[k - 1]
    opt = np.array(opt_q.tolist(), dtype=float)
    for array in (local, sub, opt):
        array.flags.writeable = False
    return StencilOperators(local, sub, opt)


def substencil_poly(averages, k, r):
    """substencil_poly - the degree r-1 polynomial matching the averages of S_k

    Parameters:
        averages - u_{-r+k} .. u_{k-1}
        k - substencil index 1..r
        r - substencil width
    """
    averages = np.asarray(averages, dtype=float)
    assert averages.shape == (r,) and 1 <= k <= r
    return Polynomial(stencil_operators(r).local[k - 1] @ averages)

def optimal_poly(averages, r):
    """optimal_poly - the degree 2r-2 polynomial matching all 2r-1 averages
    """
    averages = np.asarray(averages, dtype=float)
    assert averages.shape == (2 * r - 1,)
    return Polynomial(stencil_operators(r).opt @ averages)

def cell_average(poly):
    "Mean of a xi-basis polynomial over the reconstruction cell"
    integral = poly.integ()
    return integral(0.5) - integral(-0.5)


@functools.lru_cache(maxsize=None)
def _weno_weights(r, xhat):
    local_q, opt_q = _rational_operators(r)
    powers = sympy.Matrix([[xhat ** l for l in range(2 * r - 1)]])
    #
    # v_k is the linear functional window -> P_k(xhat), v_opt the one for
    # P_opt(xhat). v_k only touches window positions k-1 .. k+r-2, so the
    # system sum_k d_k v_k = v_opt is triangular in its first r rows and the
    # remaining rows must hold as a consistency check.
    #
    v_opt = list(powers * opt_q)
    v = []
    for k in range(1, r + 1):
        row = [sympy.Integer(0)] * (2 * r - 1)
        row[k - 1:k - 1 + r] = list(powers[:, :r] * local_q[k - 1])
        v.append(row)

    d = []
    for i in range(r):
        residual = v_opt[i] - sum(dk * v[k][i] for k, dk in enumerate(d))
        if v[i][i] == 0:
            raise x_no_positive_weights("No linear weights exist for r=%d at xi=%s" % (r, xhat))
        d.append(residual / v[i][i])
    for i in range(r, 2 * r - 1):
        if sum(dk * v[k][i] for k, dk in enumerate(d)) != v_opt[i]:
            raise x_no_positive_weights("No linear weights exist for r=%d at xi=%s" % (r, xhat))
    if not all(0 < dk < 1 for dk in d):
        raise x_no_positive_weights(
            "Linear weights for r=%d at xi=%s leave (0, 1): %s" % (r, xhat, ", ".join(str(dk) for dk in d))
        )
    return tuple(d)


def weno_optimal_weights(r, xhat):
    """weno_optimal_weights - linear weights d_1..d_r at a point of the cell

    Parameters:
        r - substencil width
        xhat - reconstruction point in local units; the supported points are
            the cell boundaries xi = -1/2 and xi = +1/2

    Returns a tuple of floats with sum_k d_k P_k(xhat) = P_opt(xhat) for all
    data. Raises x_no_positive_weights when no such weights exist or they
    are not all in (0, 1).
    """
    return tuple(float(dk) for dk in _weno_weights(r, sympy.Rational(xhat)))


#
# Smoothness indicators
#
@functools.lru_cache(maxsize=None)
def smoothness_matrix(q):
    """smoothness_matrix - exact C with I[P] = <w, C w> for degree-q polynomials

    With P = sum_i w_i xi^i / i!, the m-th derivative pairs w_i and w_j
    through the integral of xi^(i+j-2m) / ((i-m)! (j-m)!) over the cell.
    """
    if q < 1:
        raise x_recon("Smoothness matrix needs degree >= 1")
    half = sympy.Rational(1, 2)
    rows = []
    for i in range(1, q + 1):
        rows.append(tuple(
            sum(
                sympy.integrate(_xi ** (i + j - 2 * m), (_xi, -half, half))
                / (sympy.factorial(i - m) * sympy.factorial(j - m))
                for m in range(1, min(i, j) + 1)
            )
            for j in range(1, q + 1)
        ))
    return SmoothnessMatrix(q, tuple(rows))

@functools.lru_cache(maxsize=None)
def _indicator_form(q):
    C = smoothness_matrix(q).as_array()
    factorials = np.array([float(math.factorial(i)) for i in range(1, q + 1)])
    C.flags.writeable = factorials.flags.writeable = False
    return C, factorials

def indicators(coeffs):
    """Jiang-Shu indicators of xi-basis polynomials, vectorised over leading axes
    """
    coeffs = np.asarray(coeffs, dtype=float)
    q = coeffs.shape[-1] - 1
    if q == 0:
        return np.zeros(coeffs.shape[:-1])
    C, factorials = _indicator_form(q)
    w = coeffs[..., 1:] * factorials
    return np.einsum("...i,ij,...j->...", w, C, w)

def jiang_shu_indicator(poly, via=BILINEAR):
    """jiang_shu_indicator - I[P] = sum_l h^(2l-1) int_cell (P^(l))^2 dx

    In the xi basis the powers of h cancel, leaving the sum over l of the
    integrals of the squared xi-derivatives over [-1/2, 1/2].
    """
    poly = Polynomial(poly.coef if isinstance(poly, Polynomial) else poly)
    if via == BILINEAR:
        return float(indicators(poly.coef))
    elif via == DIRECT:
        total = 0.0
        for l in range(1, poly.degree() + 1):
            squared = (poly.deriv(l) ** 2).integ()
            total += squared(0.5) - squared(-0.5)
        return float(total)
    else:
        raise x_recon("Unknown indicator evaluation %r" % via)


def tau(indicator_values, variant=OPTIMAL):
    """tau - global smoothness indicator from I_1 .. I_r

    indicator_values has r entries along its last axis.
    """
    indicator_values = np.asarray(indicator_values, dtype=float)
    r = indicator_values.shape[-1]
    try:
        coefficients, _ = TAU_COMBINATIONS[variant][r]
    except KeyError:
        raise x_unsupported_order("No %s tau is defined for r=%d" % (variant, r))
    return np.abs(indicator_values @ np.array(coefficients, dtype=float))

def tau_order(r, variant=OPTIMAL):
    "Leading power of h in tau"
    try:
        return TAU_COMBINATIONS[variant][r][1]
    except KeyError:
        raise x_unsupported_order("No %s tau is defined for r=%d" % (variant, r))


def nonlinear_weights(scheme, indicator_values, h, xhat=None):
    """nonlinear_weights - normalised nonlinear weights from the indicators

    Parameters:
        scheme - ReconScheme
        indicator_values - (..., r+1) array I[P_0], I[P_1] .. I[P_r] for the
            central families; (..., r) array I[P_1] .. I[P_r] for WENO
        h - cell width, feeding eps(h)
        xhat - reconstruction point in local units (WENO only)
    """
    I = np.asarray(indicator_values, dtype=float)
    eps = scheme.eps(h)
    tau_values = None

    if scheme.family == WENO:
        if xhat is None:
            raise x_recon("WENO weights need a reconstruction point")
        d = np.array(weno_optimal_weights(scheme.r, xhat))
        alpha = d / (I + eps) ** scheme.t
    else:
        d = np.array(scheme.d)
        if scheme.family == LINEAR:
            alpha = np.broadcast_to(d, I.shape).copy()
        elif scheme.family == CWENO:
            alpha = d / (I + eps) ** scheme.t
        else:
            tau_values = np.asarray(tau(I[..., 1:], scheme.tau_variant))
            alpha = d * (1.0 + (np.expand_dims(tau_values, -1) / (I + eps)) ** scheme.t)

    omega = alpha / alpha.sum(axis=-1, keepdims=True)
    return WeightSet(omega, I, tau_values)


#
# Vectorised reconstruction
#
def stencil_windows(values, r):
    """All windows of 2r-1 consecutive entries along axis 0

    values of shape (n, ...) give windows of shape (n-2r+2, 2r-1, ...);
    window i is centred on entry i + r - 1.
    """
    windows = sliding_window_view(values, 2 * r - 1, axis=0)
    return np.moveaxis(windows, -1, 1)

def evaluate(coeffs, xi):
    """Evaluate xi-basis coefficients (n, q+1) at a point or points

    Returns (n,) for a scalar xi, (n, len(xi)) otherwise.
    """
    coeffs = np.asarray(coeffs)
    xi_array = np.atleast_1d(np.asarray(xi, dtype=float))
    vandermonde = xi_array[:, None] ** np.arange(coeffs.shape[-1])[None, :]
    values = coeffs @ vandermonde.T
    return values[..., 0] if np.ndim(xi) == 0 else values

def _substencil_coeffs(scheme, windows):
    return np.einsum("kdw,nw->nkd", stencil_operators(scheme.r).sub, windows)

def central_polynomials(scheme, windows):
    """Coefficients of P_opt, P_0 and P_1..P_r for the central families

    Returns (opt (n, 2r-1), p0 (n, 2r-1), sub (n, r, 2r-1)), the substencil
    polynomials zero-padded to degree 2r-2.
    """
    r = scheme.r
    windows = np.asarray(windows, dtype=float)
    opt = windows @ stencil_operators(r).opt.T
    sub = np.zeros(windows.shape[:1] + (r, 2 * r - 1))
    sub[..., :r] = _substencil_coeffs(scheme, windows)
    d = np.array(scheme.d)
    p0 = (opt - np.einsum("k,nkd->nd", d[1:], sub)) / d[0]
    return opt, p0, sub

def reconstruct_coefficients(scheme, windows, h):
    """reconstruct_coefficients - P_rec for every window (CWENO, CWENOZ, linear)

    Returns (coeffs (n, 2r-1), WeightSet).
    """
    if scheme.family == WENO:
        raise x_recon("WENO reconstructs point values, not a polynomial")
    r = scheme.r
    opt, p0, sub = central_polynomials(scheme, windows)
    I = np.concatenate([indicators(p0)[:, None], indicators(sub[..., :r])], axis=1)
    weights = nonlinear_weights(scheme, I, h)
    if scheme.family == LINEAR:
        return opt, weights
    coeffs = weights.omega[:, :1] * p0 + np.einsum("nk,nkd->nd", weights.omega[:, 1:], sub)
    return coeffs, weights

def weights(scheme, windows, h, xhat=0.5):
    """Nonlinear weights for every window; xhat is only used by WENO"""
    windows = np.asarray(windows, dtype=float)
    if scheme.family == WENO:
        I = indicators(_substencil_coeffs(scheme, windows))
        return nonlinear_weights(scheme, I, h, xhat)
    _, weight_set = reconstruct_coefficients(scheme, windows, h)
    return weight_set

def reconstruct_boundaries(scheme, windows, h):
    """reconstruct_boundaries - values at xi = -1/2 and xi = +1/2 for every window

    Returns (left, right), each of shape (n,).
    """
    windows = np.asarray(windows, dtype=float)
    if scheme.family != WENO:
        coeffs, _ = reconstruct_coefficients(scheme, windows, h)
        values = evaluate(coeffs, [-0.5, 0.5])
        return values[:, 0], values[:, 1]

    #
    # WENO: one indicator per substencil, but a separate set of linear and
    # nonlinear weights for each boundary point
    #
    sub = _substencil_coeffs(scheme, windows)
    I = indicators(sub)
    sides = []
    for xhat in (-0.5, 0.5):
        omega = nonlinear_weights(scheme, I, h, xhat).omega
        sides.append(np.einsum("nk,nk->n", omega, evaluate(sub, xhat)))
    return tuple(sides)


def reconstruct(scheme, window, h=1.0):
    """reconstruct - reconstruct one cell from its window of 2r-1 averages

    Returns the P_rec Polynomial in the xi basis for CWENO / CWENOZ / linear,
    and the pair (value at xi=-1/2, value at xi=+1/2) for WENO.
    """
    window = np.asarray(window, dtype=float)[None, :]
    if scheme.family == WENO:
        left, right = reconstruct_boundaries(scheme, window, h)
        return float(left[0]), float(right[0])
    coeffs, _ = reconstruct_coefficients(scheme, window, h)
    return Polynomial(coeffs[0])
