"""models - flux models and the registry of test problems

Linear advection, the 1D Euler equations of gas dynamics and the shallow
water equations over a smooth bottom, with the initial data of the
benchmark problems run by the bench command line.
"""
import collections
import logging
import math

import numpy as np

from . import mesh
from . import recon
from .solver import FluxModel, default_eps_rule, x_inadmissible_state

logger = logging.getLogger(__name__)

GAMMA = 1.4
GRAVITY = 9.812

class x_models(Exception): pass
class x_unknown_problem(x_models, ValueError): pass


class Advection(FluxModel):
    "u_t + a u_x = 0"

    name = "advection"
    components = 1

    def __init__(self, speed=1.0):
        self.speed = float(speed)

    def flux(self, u):
        return self.speed * np.asarray(u, dtype=float)

    def max_wavespeed(self, u):
        return np.full(np.shape(u)[0], abs(self.speed))

    def eigen_decomposition(self, u):
        identity = np.ones((np.shape(u)[0], 1, 1))
        return identity, identity


class Euler(FluxModel):
    """Euler equations for an ideal gas, conserved state (rho, rho u, E)

    p = (gamma - 1)(E - rho u^2 / 2)
    """

    name = "euler"
    components = 3

    def __init__(self, gamma=GAMMA):
        self.gamma = float(gamma)

    def primitive(self, u):
        "(rho, velocity, pressure) of conserved states"
        u = np.asarray(u, dtype=float)
        rho, momentum, energy = u[..., 0], u[..., 1], u[..., 2]
        velocity = momentum / rho
        pressure = (self.gamma - 1.0) * (energy - 0.5 * momentum * velocity)
        return rho, velocity, pressure

    def conservative(self, rho, velocity, pressure):
        rho, velocity, pressure = np.broadcast_arrays(
            np.asarray(rho, dtype=float), np.asarray(velocity, dtype=float), np.asarray(pressure, dtype=float)
        )
        energy = pressure / (self.gamma - 1.0) + 0.5 * rho * velocity ** 2
        return np.stack([rho, rho * velocity, energy], axis=-1)

    def sound_speed(self, rho, pressure):
        return np.sqrt(self.gamma * pressure / rho)

    def check_admissible(self, u):
        u = np.asarray(u, dtype=float).reshape(-1, 3)
        with np.errstate(divide="ignore", invalid="ignore"):
            rho, _, pressure = self.primitive(u)
            good = (rho > 0) & (pressure > 0)
        if not np.all(good):
            bad = np.flatnonzero(~good)
            raise x_inadmissible_state(
                "%d of %d Euler states have non-positive density or pressure (first: rho=%g p=%g)"
                % (len(bad), len(u), rho[bad[0]], pressure[bad[0]])
            )

    def flux(self, u):
        rho, velocity, pressure = self.primitive(u)
        momentum = rho * velocity
        energy = np.asarray(u, dtype=float)[..., 2]
        return np.stack([momentum, momentum * velocity + pressure, velocity * (energy + pressure)], axis=-1)

    def max_wavespeed(self, u):
        rho, velocity, pressure = self.primitive(u)
        return np.abs(velocity) + self.sound_speed(rho, pressure)

    def eigen_decomposition(self, u):
        rho, v, pressure = self.primitive(u)
        c = self.sound_speed(rho, pressure)
        H = (np.asarray(u, dtype=float)[..., 2] + pressure) / rho
        ones = np.ones_like(v)

        right = np.empty(v.shape + (3, 3))
        right[..., 0, :] = np.stack([ones, ones, ones], axis=-1)
        right[..., 1, :] = np.stack([v - c, v, v + c], axis=-1)
        right[..., 2, :] = np.stack([H - v * c, 0.5 * v ** 2, H + v * c], axis=-1)

        b1 = (self.gamma - 1.0) / c ** 2
        b2 = 0.5 * b1 * v ** 2
        left = np.empty_like(right)
        left[..., 0, :] = np.stack([0.5 * (b2 + v / c), -0.5 * (b1 * v + 1.0 / c), 0.5 * b1], axis=-1)
        left[..., 1, :] = np.stack([1.0 - b2, b1 * v, -b1], axis=-1)
        left[..., 2, :] = np.stack([0.5 * (b2 - v / c), -0.5 * (b1 * v - 1.0 / c), 0.5 * b1], axis=-1)
        return left, right


class ShallowWater(FluxModel):
    """Shallow water equations, state (depth, discharge), over a bottom z(x)

        h_t + q_x = 0
        q_t + (q^2/h + g h^2/2)_x = -g h z_x
    """

    name = "swe"
    components = 2
    has_source = True

    def __init__(self, z, z_x, g=GRAVITY):
        self.z = z
        self.z_x = z_x
        self.g = float(g)

    def check_admissible(self, u):
        depth = np.asarray(u, dtype=float).reshape(-1, 2)[:, 0]
        good = depth > 0
        if not np.all(good):
            bad = np.flatnonzero(~good)
            raise x_inadmissible_state(
                "%d of %d shallow water states have non-positive depth (first: h=%g)" % (len(bad), len(depth), depth[bad[0]])
            )

    def flux(self, u):
        u = np.asarray(u, dtype=float)
        depth, discharge = u[..., 0], u[..., 1]
        return np.stack([discharge, discharge ** 2 / depth + 0.5 * self.g * depth ** 2], axis=-1)

    def max_wavespeed(self, u):
        u = np.asarray(u, dtype=float)
        depth, discharge = u[..., 0], u[..., 1]
        return np.abs(discharge / depth) + np.sqrt(self.g * depth)

    def eigen_decomposition(self, u):
        u = np.asarray(u, dtype=float)
        depth = u[..., 0]
        v = u[..., 1] / depth
        c = np.sqrt(self.g * depth)
        ones = np.ones_like(v)
        right = np.stack([np.stack([ones, ones], axis=-1), np.stack([v - c, v + c], axis=-1)], axis=-2)
        left = np.stack([np.stack([v + c, -ones], axis=-1), np.stack([c - v, ones], axis=-1)], axis=-2)
        return left / (2.0 * c)[..., None, None], right

    def source(self, u, x):
        "Pointwise source (0, -g h z_x)"
        u = np.asarray(u, dtype=float)
        momentum = -self.g * u[..., 0] * self.z_x(np.asarray(x, dtype=float))
        return np.stack([np.zeros_like(momentum), momentum], axis=-1)

    def source_average(self, coeffs, centers, h, order):
        momentum = swe_source_average(coeffs[:, 0, :], centers, h, self.z_x, order, self.g)
        return np.stack([np.zeros_like(momentum), momentum], axis=-1)


def romberg_trapezoid(f, levels):
    """romberg_trapezoid - mean of f over xi in [-1/2, 1/2] by Richardson-extrapolated trapezoids

    Parameters:
        f - vectorised in xi; given the node array it returns values with the
            nodes along the last axis
        levels - number of nested trapezoid rules, with 1, 2, 4 .. 2**(levels-1)
            intervals; the result is exact for polynomials of degree
            2*levels - 1

    f is evaluated once, on the finest node set.
    """
    if levels < 1:
        raise x_models("Romberg quadrature needs at least one level")
    finest = 2 ** (levels - 1)
    values = np.asarray(f(np.linspace(-0.5, 0.5, finest + 1)), dtype=float)

    table = []
    for level in range(levels):
        sample = values[..., ::2 ** (levels - 1 - level)]
        intervals = sample.shape[-1] - 1
        table.append((sample.sum(axis=-1) - 0.5 * (sample[..., 0] + sample[..., -1])) / intervals)
    for k in range(1, levels):
        factor = 4.0 ** k
        table = [(factor * fine - coarse) / (factor - 1.0) for coarse, fine in zip(table, table[1:])]
    return table[0]

def swe_source_average(depth_coeffs, centers, h, z_x, order, g=GRAVITY):
    """swe_source_average - cell averages of -g h(x) z_x(x)

    Parameters:
        depth_coeffs - (n, q+1) xi-basis reconstruction polynomials of the depth
        centers - (n,) cell centres
        h - cell width
        z_x - vectorised bottom slope
        order - scheme order; orders 3, 5, 7, 9 use 1, 3, 7, 15 interior nodes

    Depth values come from the single reconstruction polynomial of the
    cell, so the interior nodes are as accurate as the boundary ones.
    """
    depth_coeffs = np.atleast_2d(np.asarray(depth_coeffs, dtype=float))
    centers = np.atleast_1d(np.asarray(centers, dtype=float))

    def integrand(xi):
        depth = recon.evaluate(depth_coeffs, xi)
        slope = z_x(centers[:, None] + h * xi[None, :])
        return -g * depth * slope

    return romberg_trapezoid(integrand, (order + 1) // 2)


def advection_model(speed=1.0):
    return Advection(speed)

def euler_model(gamma=GAMMA):
    return Euler(gamma)

def swe_model(z, z_x, g=GRAVITY):
    return ShallowWater(z, z_x, g)


#
# Initial data
#
def _wrap(x, x_lo=-1.0, x_hi=1.0):
    "Periodic image of x in [x_lo, x_hi)"
    return x_lo + np.mod(np.asarray(x, dtype=float) - x_lo, x_hi - x_lo)

def smooth_data(x):
    "Low frequency sine with a high frequency wave packet around the origin"
    x = np.asarray(x, dtype=float)
    return np.sin(np.pi * x) - np.sin(15 * np.pi * x) * np.exp(-20 * x ** 2)

def _gaussian(x, beta, z):
    return np.exp(-beta * (x - z) ** 2)

def _ellipse(x, alpha, a):
    return np.sqrt(np.maximum(1.0 - alpha ** 2 * (x - a) ** 2, 0.0))

def ellipse_data(x, delta=0.005):
    "Averaged semi-ellipses of half width 1/10 centred near x = 0.5"
    x = np.asarray(x, dtype=float)
    return (_ellipse(x, 10, 0.5 - delta) + _ellipse(x, 10, 0.5 + delta) + 4 * _ellipse(x, 10, 0.5)) / 6.0

def jiangshu_composite_data(x):
    """jiangshu_composite_data - four features on [-1, 1], zero elsewhere

        [-0.8, -0.6]  averaged Gaussians, z = -0.7, delta = 0.005, beta = log 2 / (36 delta^2)
        [-0.4, -0.2]  square wave of height 1
        [ 0.0,  0.2]  triangle 1 - |10 (x - 0.1)|
        [ 0.4,  0.6]  averaged semi-ellipses, alpha = 10, a = 0.5, delta = 0.005
    """
    x = np.asarray(x, dtype=float)
    delta, z = 0.005, -0.7
    beta = math.log(2.0) / (36 * delta ** 2)
    gaussians = (_gaussian(x, beta, z - delta) + _gaussian(x, beta, z + delta) + 4 * _gaussian(x, beta, z)) / 6.0
    triangle = 1.0 - np.abs(10.0 * (x - 0.1))
    return np.select(
        [
            (x >= -0.8) & (x <= -0.6),
            (x >= -0.4) & (x <= -0.2),
            (x >= 0.0) & (x <= 0.2),
            (x >= 0.4) & (x <= 0.6),
        ],
        [gaussians, np.ones_like(x), triangle, ellipse_data(x)],
        default=0.0,
    )

def _transported(u0, speed=1.0, x_lo=-1.0, x_hi=1.0):
    def exact(x, t):
        return u0(_wrap(np.asarray(x, dtype=float) - speed * t, x_lo, x_hi))
    return exact

_EULER = Euler()

def lax_data(x):
    x = np.asarray(x, dtype=float)
    left = x < 0
    return _EULER.conservative(
        np.where(left, 0.445, 0.5), np.where(left, 0.6989, 0.0), np.where(left, 3.5277, 0.571)
    )

def shu_osher_data(x):
    x = np.asarray(x, dtype=float)
    left = x < -4
    return _EULER.conservative(
        np.where(left, 3.857143, 1.0 + 0.2 * np.sin(5 * x)),
        np.where(left, 2.629369, 0.0),
        np.where(left, 10.333333, 1.0),
    )

def swe_bottom(x):
    return np.sin(np.pi * np.asarray(x, dtype=float)) ** 2

def swe_bottom_slope(x):
    return np.pi * np.sin(2 * np.pi * np.asarray(x, dtype=float))

def swe_smooth_data(x):
    x = np.asarray(x, dtype=float)
    wave = np.cos(2 * np.pi * x)
    return np.stack([5.0 + np.exp(wave), np.sin(wave)], axis=-1)


#
# Problem registry
#
ProblemSpec = collections.namedtuple(
    "ProblemSpec",
    ["name", "model", "domain", "M", "bc", "t_end", "initial", "exact", "characteristic", "eps_rule"],
)
ProblemSpec.__doc__ = """A named benchmark problem

    initial - vectorised point function x -> state (scalar, or trailing
        axis of length model.components)
    exact - (x, t) -> state, or None when convergence is measured against a
        fine grid reference
    characteristic - default for characteristic-wise reconstruction
    eps_rule - (c, p) for eps = c h^p with h in domain lengths, or None for
        the solver default of the scheme order
"""

#
# Shock tubes keep eps = h^2 at every order; eps = h lets the third
# order weights go linear next to the contact
#
SHOCK_EPS_RULE = (1.0, 2.0)

PROBLEMS = collections.OrderedDict(
    (problem.name, problem) for problem in [
        ProblemSpec(
            "advection-smooth17", advection_model(), (-1.0, 1.0), 160, mesh.PERIODIC, 2.0,
            smooth_data, _transported(smooth_data), False, None,
        ),
        ProblemSpec(
            "advection-jiangshu", advection_model(), (-1.0, 1.0), 400, mesh.PERIODIC, 8.0,
            jiangshu_composite_data, _transported(jiangshu_composite_data), False, None,
        ),
        ProblemSpec(
            "advection-ellipse18", advection_model(), (-1.0, 1.0), 400, mesh.PERIODIC, 8.0,
            ellipse_data, _transported(ellipse_data), False, None,
        ),
        ProblemSpec(
            "euler-lax", euler_model(), (-5.0, 5.0), 200, mesh.EXTRAPOLATE, 1.3,
            lax_data, None, True, SHOCK_EPS_RULE,
        ),
        ProblemSpec(
            "euler-shuosher", euler_model(), (-5.0, 5.0), 400, mesh.EXTRAPOLATE, 1.8,
            shu_osher_data, None, True, SHOCK_EPS_RULE,
        ),
        ProblemSpec(
            "swe-smooth19", swe_model(swe_bottom, swe_bottom_slope), (0.0, 1.0), 128, mesh.PERIODIC, 0.1,
            swe_smooth_data, None, False, None,
        ),
    ]
)

def problem_from_key(key):
    try:
        return PROBLEMS[key]
    except KeyError:
        raise x_unknown_problem("Unknown problem %r; choose from %s" % (key, ", ".join(PROBLEMS)))

def eps_rule_for(problem, order, eps_rule=None):
    """eps_rule_for - the eps rule of a run, acting on the physical cell width

    The rule given, else the problem's own, else the solver default for the
    order, measures h in domain lengths; the coefficient is rescaled so that
    ReconScheme.eps can be fed the grid's h.
    """
    c, p = eps_rule or problem.eps_rule or default_eps_rule(order)
    x_lo, x_hi = problem.domain
    return (c / (x_hi - x_lo) ** p, p)

def initial_field(problem, scheme, M=None):
    """initial_field - cell averages of a problem's initial data, ghosts filled

    The grid carries r ghost cells for the scheme's substencil width r.
    """
    x_lo, x_hi = problem.domain
    grid = mesh.make_grid(x_lo, x_hi, M or problem.M, ghost=scheme.r)
    field = mesh.init_averages(
        grid, problem.initial, mesh.quadrature_nodes(scheme.r), problem.model.components
    )
    return mesh.fill_ghosts(field, problem.bc)

def exact_averages(problem, grid, t, quad_order=5):
    "Exact cell averages at time t, for problems with an exact solution"
    if problem.exact is None:
        raise x_models("Problem %s has no exact solution" % problem.name)
    field = mesh.init_averages(grid, lambda x: problem.exact(x, t), quad_order, problem.model.components)
    return field.interior.copy()
