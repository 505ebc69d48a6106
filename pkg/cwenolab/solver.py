"""solver - semidiscrete finite volume evolution of 1D balance laws

    d u_j / dt = -(F_{j+1/2} - F_{j-1/2}) / h + (source average)_j

with local Lax-Friedrichs interface fluxes on reconstructed boundary values
and explicit Runge-Kutta time stepping under a CFL restriction.
"""
import collections
import csv
import logging

import numpy as np
import sympy

from . import mesh
from . import recon

logger = logging.getLogger(__name__)

DEFAULT_CFL = 0.45

class x_solver(Exception): pass
class x_invalid_config(x_solver, ValueError): pass
class x_unsupported(x_solver): pass
class x_inadmissible_state(x_solver): pass

class x_blowup(x_solver):
    def __init__(self, step, message):
        x_solver.__init__(self, "Step %d: %s" % (step, message))
        self.step = step


class FluxModel(object):
    """Base class for the flux of a system of conservation (or balance) laws

    States are arrays of shape (n, components). Subclasses supply flux and
    max_wavespeed and, where they have them, eigen_decomposition and
    source_average.
    """

    name = "model"
    components = 1
    has_source = False

    def flux(self, u):
        raise NotImplementedError

    def max_wavespeed(self, u):
        "Spectral radius of the flux Jacobian, shape (n,)"
        raise NotImplementedError

    def check_admissible(self, u):
        "Raise x_inadmissible_state if any state is outside the admissible set"
        pass

    def eigen_decomposition(self, u):
        """(left, right) eigenvector matrices of the flux Jacobian, each (n, m, m)

        Rows of `left` are left eigenvectors, columns of `right` right
        eigenvectors, with left @ right = I. None when the model has none.
        """
        return None

    def source_average(self, coeffs, centers, h, order):
        """Cell averages of the source term, shape (n, m)

        coeffs - (n, m, q+1) xi-basis reconstruction polynomials of each
            conserved component in each cell
        """
        return None


class RKTableau(collections.namedtuple("RKTableau", ["name", "A", "b", "c", "order"])):
    """An explicit Runge-Kutta method as a Butcher tableau"""
    __slots__ = ()

    @property
    def stages(self):
        return len(self.b)

    def validate(self):
        s = self.stages
        A = np.asarray(self.A, dtype=float)
        if A.shape != (s, s) or len(self.c) != s:
            raise x_invalid_config("Tableau %s is not %d x %d" % (self.name, s, s))
        if np.any(np.triu(A) != 0):
            raise x_invalid_config("Tableau %s is not explicit" % self.name)
        if abs(sum(self.b) - 1.0) > 1e-14:
            raise x_invalid_config("Weights of tableau %s do not sum to 1" % self.name)
        if np.max(np.abs(A.sum(axis=1) - np.asarray(self.c))) > 1e-14:
            raise x_invalid_config("Nodes of tableau %s are not the row sums of A" % self.name)
        return self

def _tableau(name, A, b, c, order):
    try:
        as_float = lambda values: tuple(float(sympy.Rational(v)) for v in values)
        A, b, c = tuple(as_float(row) for row in A), as_float(b), as_float(c)
    except (TypeError, ValueError) as e:
        raise x_invalid_config("Tableau %s has a non-numeric entry: %s" % (name, e))
    return RKTableau(name, A, b, c, order).validate()

SSPRK3 = _tableau(
    "ssprk3",
    A=[[0, 0, 0], [1, 0, 0], ["1/4", "1/4", 0]],
    b=["1/6", "1/6", "2/3"],
    c=[0, 1, "1/2"],
    order=3,
)

#
# Butcher's six-stage fifth order method
#
BUTCHER_RK5 = _tableau(
    "butcher-rk5",
    A=[
        [0, 0, 0, 0, 0, 0],
        ["1/4", 0, 0, 0, 0, 0],
        ["1/8", "1/8", 0, 0, 0, 0],
        [0, "-1/2", 1, 0, 0, 0],
        ["3/16", 0, 0, "9/16", 0, 0],
        ["-3/7", "2/7", "12/7", "-12/7", "8/7", 0],
    ],
    b=["7/90", 0, "32/90", "12/90", "32/90", "7/90"],
    c=[0, "1/4", "1/4", "1/2", "3/4", 1],
    order=5,
)

def tableau_for_order(order):
    """The shipped integrator matching a spatial order

    Orders above 5 fall back to the fifth order tableau; supply the higher
    order ones through load_tableau.
    """
    if order <= 3:
        return SSPRK3
    if order > 5:
        logger.warning("No order %d Runge-Kutta tableau is shipped; using %s", order, BUTCHER_RK5.name)
    return BUTCHER_RK5

def default_eps_rule(order):
    """The (c, p) of eps = c h^p used for evolution runs

    Order 3 takes eps = h; with h^2 the weights of the third order schemes
    stay nonlinear on smooth data and the rate drops below 3. Higher
    orders take h^2.
    """
    if order <= 3:
        return (1.0, 1.0)
    return recon.DEFAULT_EPS_RULE

def load_tableau(filepath, name=None):
    """load_tableau - read a Butcher tableau from a CSV file

    The file holds s rows `c_i, a_i1, ..., a_is` followed by one row
    `order, b_1, ..., b_s`. Entries may be fractions such as 1/6; lines
    starting with # are ignored.
    """
    with open(filepath, newline="") as f:
        rows = [
            [cell.strip() for cell in row]
            for row in csv.reader(f)
            if row and not row[0].strip().startswith("#")
        ]
    if len(rows) < 2:
        raise x_invalid_config("%s does not hold a tableau" % filepath)
    *stage_rows, last = rows
    c = [row[0] for row in stage_rows]
    A = [row[1:] for row in stage_rows]
    order, b = int(last[0]), last[1:]
    logger.debug("Read %d-stage tableau from %s", len(b), filepath)
    return _tableau(name or filepath, A, b, c, order)


class SolverConfig(collections.namedtuple("SolverConfig", ["scheme", "cfl", "bc", "characteristic", "t_end"])):
    __slots__ = ()

    def __new__(cls, scheme, cfl=DEFAULT_CFL, bc=mesh.PERIODIC, characteristic=False, t_end=1.0):
        if not 0 < cfl < 1:
            raise x_invalid_config("CFL number %r is not in (0, 1)" % cfl)
        if bc not in mesh.BOUNDARY_CONDITIONS:
            raise x_invalid_config("Unknown boundary condition %r" % bc)
        if not t_end > 0:
            raise x_invalid_config("Final time %r is not positive" % t_end)
        return super(SolverConfig, cls).__new__(cls, scheme, cfl, bc, bool(characteristic), float(t_end))

StepRecord = collections.namedtuple("StepRecord", ["step", "t", "dt", "max_wavespeed"])


def llf_flux(model, uL, uR):
    """llf_flux - local Lax-Friedrichs flux at one or many interfaces

        F = (f(uL) + f(uR))/2 - alpha (uR - uL)/2

    with alpha the larger of the two states' maximal wave speeds.
    """
    shape = np.shape(uL)
    uL = np.asarray(uL, dtype=float).reshape(-1, model.components)
    uR = np.asarray(uR, dtype=float).reshape(-1, model.components)
    model.check_admissible(uL)
    model.check_admissible(uR)
    alpha = np.maximum(model.max_wavespeed(uL), model.max_wavespeed(uR))
    F = 0.5 * (model.flux(uL) + model.flux(uR)) - 0.5 * alpha[:, None] * (uR - uL)
    if len(shape) < 2:
        return F.reshape(shape)
    return F


def reconstruct_states(model, windows, scheme, h, characteristic=False):
    """Boundary values (and polynomials) of every cell from its windows

    Parameters:
        windows - (n, 2r-1, m) stencil windows of conserved averages

    Returns (left, right, coeffs): values at the left and right cell
    boundaries, each (n, m), and the (n, m, 2r-1) reconstruction
    polynomials in conserved variables (None for WENO).

    In characteristic mode the window is projected onto the left
    eigenvectors of the Jacobian at the central average, reconstructed
    field by field and projected back.
    """
    n, width, m = windows.shape
    right_vectors = None
    if characteristic and m > 1:
        decomposition = model.eigen_decomposition(windows[:, scheme.r - 1, :])
        if decomposition is None:
            raise x_unsupported("%s has no eigen decomposition" % model.name)
        left_vectors, right_vectors = decomposition
        windows = np.einsum("nij,nwj->nwi", left_vectors, windows)

    flat = windows.transpose(0, 2, 1).reshape(n * m, width)
    if scheme.family == recon.WENO:
        left, right = recon.reconstruct_boundaries(scheme, flat, h)
        left, right = left.reshape(n, m), right.reshape(n, m)
        if right_vectors is not None:
            left = np.einsum("nij,nj->ni", right_vectors, left)
            right = np.einsum("nij,nj->ni", right_vectors, right)
        return left, right, None

    coeffs, _ = recon.reconstruct_coefficients(scheme, flat, h)
    coeffs = coeffs.reshape(n, m, -1)
    if right_vectors is not None:
        coeffs = np.einsum("nij,njd->nid", right_vectors, coeffs)
    values = recon.evaluate(coeffs, [-0.5, 0.5])
    return values[..., 0], values[..., 1], coeffs


def semidiscrete_rhs(model, field, config):
    """semidiscrete_rhs - time derivative of the interior cell averages

    The ghost layers of `field` are refilled from config.bc. Returns an
    (M, m) array.
    """
    scheme = config.scheme
    grid = field.grid
    r, g, M, h = scheme.r, grid.ghost, grid.M, grid.h
    if g < r:
        raise x_invalid_config("Order %d needs %d ghost cells, grid has %d" % (scheme.order, r, g))
    if model.has_source and scheme.family == recon.WENO:
        raise x_unsupported("Source quadrature needs a CWENO or CWENOZ reconstruction polynomial")

    mesh.fill_ghosts(field, config.bc)
    #
    # Reconstruct cells -1 .. M so that every interface -1/2 .. M-1/2 has a
    # value on both sides
    #
    block = field.values[g - r:g + M + r]
    windows = recon.stencil_windows(block, r)
    left, right, coeffs = reconstruct_states(model, windows, scheme, h, config.characteristic)

    fluxes = llf_flux(model, right[:-1], left[1:])
    rhs = -(fluxes[1:] - fluxes[:-1]) / h
    if model.has_source:
        rhs += model.source_average(coeffs[1:-1], grid.centers, h, scheme.order)
    return rhs


def rk_step(tableau, rhs, u, dt):
    """One explicit Runge-Kutta step of du/dt = rhs(u)"""
    stages = []
    for i in range(tableau.stages):
        stage_u = u
        for j, a in enumerate(tableau.A[i][:i]):
            if a:
                stage_u = stage_u + (dt * a) * stages[j]
        stages.append(rhs(stage_u))
    update = u
    for b, k in zip(tableau.b, stages):
        if b:
            update = update + (dt * b) * k
    return update


def advance(model, field0, config, tableau=None):
    """advance - integrate a field from t = 0 to config.t_end

    Parameters:
        model - FluxModel
        field0 - initial CellField (ghost width >= r); not modified
        config - SolverConfig
        tableau - RKTableau, by default the one matching the scheme order

    Returns (field, steps) where steps is a list of StepRecord. The step
    size is cfl * h / max_j max_wavespeed(u_j), recomputed each step, and
    the last step is clipped to land on t_end.
    """
    if tableau is None:
        tableau = tableau_for_order(config.scheme.order)
    grid = field0.grid
    work = field0.copy()
    u = work.interior.copy()

    def rhs(stage_u):
        model.check_admissible(stage_u)
        work.values[grid.interior] = stage_u
        return semidiscrete_rhs(model, work, config)

    t, step, steps = 0.0, 0, []
    t_end = config.t_end
    logger.debug("Advance %s with %s / %s to t=%g on %d cells", model.name, config.scheme.label, tableau.name, t_end, grid.M)
    while t < t_end:
        speed = float(np.max(model.max_wavespeed(u)))
        if not np.isfinite(speed):
            raise x_blowup(step, "wave speed is %r at t=%g" % (speed, t))
        dt = config.cfl * grid.h / speed if speed > 0 else t_end - t
        clipped = t + dt >= t_end * (1.0 - 1e-14)
        if clipped:
            dt = t_end - t

        try:
            u = rk_step(tableau, rhs, u, dt)
            if not np.all(np.isfinite(u)):
                raise x_blowup(step, "non-finite values at t=%g" % t)
            model.check_admissible(u)
        except x_inadmissible_state as exc:
            raise x_blowup(step, str(exc))

        t = t_end if clipped else t + dt
        step += 1
        steps.append(StepRecord(step, t, dt, speed))
        logger.debug("step %d t=%.6g dt=%.3g speed=%.4g", step, t, dt, speed)

    work.values[grid.interior] = u
    mesh.fill_ghosts(work, config.bc)
    return work, steps
