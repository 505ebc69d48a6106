"""mesh - uniform 1D grids and cell-average fields with ghost layers
"""
import collections
import logging

import numpy as np

logger = logging.getLogger(__name__)

PERIODIC = "periodic"
EXTRAPOLATE = "extrapolate"
BOUNDARY_CONDITIONS = (PERIODIC, EXTRAPOLATE)

class x_mesh(Exception): pass
class x_invalid_extent(x_mesh, ValueError): pass

def quadrature_nodes(r):
    """Gauss-Legendre nodes per cell used to initialise an order 2r-1 scheme"""
    return max(5, r + 1)


class Grid(collections.namedtuple("Grid", ["x_lo", "x_hi", "M", "ghost"])):
    """A uniform mesh of M cells on [x_lo, x_hi] padded with `ghost` cells each side

    Array index i of a field holds cell j = i - ghost, so the interior
    occupies indices ghost .. ghost+M-1.
    """
    __slots__ = ()

    @property
    def h(self):
        return (self.x_hi - self.x_lo) / self.M

    @property
    def n_total(self):
        return self.M + 2 * self.ghost

    @property
    def interior(self):
        return slice(self.ghost, self.ghost + self.M)

    @property
    def edges(self):
        "Left edges of the interior cells plus x_hi"
        return self.x_lo + np.arange(self.M + 1) * self.h

    @property
    def centers(self):
        return self.x_lo + (np.arange(self.M) + 0.5) * self.h


class CellField(object):
    """Cell averages of `components` conserved variables on a grid

    values has shape (M + 2*ghost, components); the ghost rows are only
    meaningful after fill_ghosts.
    """

    def __init__(self, grid, components=1, values=None):
        self.grid = grid
        self.components = components
        if values is None:
            values = np.zeros((grid.n_total, components))
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape != (grid.n_total, components):
            raise x_mesh(
                "Field of shape %s does not fit grid of %d cells x %d components"
                % (values.shape, grid.n_total, components)
            )
        self.values = values

    def __repr__(self):
        return "<CellField M=%d ghost=%d components=%d>" % (
            self.grid.M, self.grid.ghost, self.components
        )

    @property
    def interior(self):
        return self.values[self.grid.interior]

    def copy(self):
        return CellField(self.grid, self.components, self.values.copy())

    def total(self):
        "Discrete integral sum_j h*u_j of each component over the interior"
        return self.grid.h * self.interior.sum(axis=0)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))


def make_grid(x_lo, x_hi, M, ghost=0):
    """make_grid - build a uniform grid

    Parameters:
        x_lo, x_hi - domain endpoints
        M - number of interior cells
        ghost - ghost-layer width on each side

    Cell j covers [x_lo + j*h, x_lo + (j+1)*h].
    """
    if not x_hi > x_lo:
        raise x_invalid_extent("Domain [%s, %s] is empty" % (x_lo, x_hi))
    if ghost < 0:
        raise x_invalid_extent("Ghost width %d is negative" % ghost)
    if M < 1 or M < 2 * ghost + 1:
        raise x_invalid_extent("%d cells cannot carry %d ghost cells each side" % (M, ghost))
    return Grid(float(x_lo), float(x_hi), int(M), int(ghost))


def init_averages(grid, f, quad_order=5, components=1):
    """init_averages - cell averages of a point function by Gauss-Legendre quadrature

    Parameters:
        grid - the Grid
        f - vectorised point function; given an array of x it returns an
            array of the same shape (scalar) or with a trailing axis of
            length `components`
        quad_order - number of Gauss-Legendre nodes per cell

    Only interior cells are initialised; ghosts are left at zero until
    fill_ghosts is called.
    """
    nodes, weights = np.polynomial.legendre.leggauss(quad_order)
    #
    # Map the reference nodes on [-1, 1] into every cell at once: x has
    # shape (M, quad_order)
    #
    x = grid.centers[:, None] + 0.5 * grid.h * nodes[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.ndim == 2:
        fx = fx[:, :, None]
    averages = 0.5 * np.einsum("q,jqc->jc", weights, fx)

    field = CellField(grid, components)
    field.values[grid.interior] = averages
    return field


def fill_ghosts(field, bc):
    """fill_ghosts - fill the ghost layers in place and return the field

    periodic: ghost cell j < 0 takes u_{j+M}, ghost cell j >= M takes u_{j-M}
    extrapolate: every ghost cell copies the nearest interior cell
    """
    g, M = field.grid.ghost, field.grid.M
    if g == 0:
        return field
    values = field.values
    if bc == PERIODIC:
        if M < g:
            raise x_mesh("Periodic fill needs at least %d interior cells" % g)
        values[:g] = values[M:M + g]
        values[g + M:] = values[g:2 * g]
    elif bc == EXTRAPOLATE:
        values[:g] = values[g]
        values[g + M:] = values[g + M - 1]
    else:
        raise x_mesh("Unknown boundary condition %r" % bc)
    return field
