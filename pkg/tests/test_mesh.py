import numpy as np
import pytest

from cwenolab import mesh


def test_make_grid_geometry():
    grid = mesh.make_grid(-1, 1, 8, ghost=2)
    assert grid.h == pytest.approx(0.25)
    assert grid.n_total == 12
    np.testing.assert_allclose(grid.centers, -1 + 0.125 + 0.25 * np.arange(8))
    np.testing.assert_allclose(grid.edges[[0, -1]], [-1, 1])
    assert grid.interior == slice(2, 10)

@pytest.mark.parametrize("x_lo, x_hi, M, ghost", [
    (1, 1, 10, 0),
    (1, 0, 10, 0),
    (0, 1, 0, 0),
    (0, 1, 4, 2),
    (0, 1, 10, -1),
])
def test_make_grid_rejects_bad_extent(x_lo, x_hi, M, ghost):
    with pytest.raises(mesh.x_invalid_extent):
        mesh.make_grid(x_lo, x_hi, M, ghost)

def test_init_averages_exact_for_polynomials():
    grid = mesh.make_grid(0, 2, 10)
    field = mesh.init_averages(grid, lambda x: x ** 3)
    edges = grid.edges
    exact = (edges[1:] ** 4 - edges[:-1] ** 4) / (4 * grid.h)
    np.testing.assert_allclose(field.interior[:, 0], exact, rtol=1e-13)

def test_init_averages_of_system():
    grid = mesh.make_grid(0, 1, 6, ghost=1)
    field = mesh.init_averages(grid, lambda x: np.stack([np.ones_like(x), 2 * x], axis=-1), components=2)
    assert field.values.shape == (8, 2)
    np.testing.assert_allclose(field.interior[:, 0], 1.0)
    np.testing.assert_allclose(field.interior[:, 1], 2 * grid.centers)
    np.testing.assert_allclose(field.total(), [1.0, 1.0])

def test_fill_ghosts_periodic():
    grid = mesh.make_grid(0, 1, 5, ghost=2)
    field = mesh.CellField(grid)
    field.values[grid.interior, 0] = np.arange(5)
    mesh.fill_ghosts(field, mesh.PERIODIC)
    np.testing.assert_array_equal(field.values[:, 0], [3, 4, 0, 1, 2, 3, 4, 0, 1])

@pytest.mark.parametrize("bc", [mesh.PERIODIC, mesh.EXTRAPOLATE])
def test_fill_ghosts_is_idempotent(bc):
    grid = mesh.make_grid(0, 1, 7, ghost=3)
    field = mesh.CellField(grid)
    field.values[grid.interior, 0] = np.random.default_rng(4).normal(size=7)
    once = mesh.fill_ghosts(field, bc).values.copy()
    np.testing.assert_array_equal(mesh.fill_ghosts(field, bc).values, once)

def test_periodic_fill_commutes_with_shift():
    grid = mesh.make_grid(0, 1, 9, ghost=2)
    values = np.random.default_rng(5).normal(size=9)
    field = mesh.CellField(grid)
    field.values[grid.interior, 0] = values
    shifted = mesh.CellField(grid)
    shifted.values[grid.interior, 0] = np.roll(values, 3)
    mesh.fill_ghosts(field, mesh.PERIODIC)
    mesh.fill_ghosts(shifted, mesh.PERIODIC)
    #
    # Padding the rolled averages is rolling the padded averages' interior
    #
    np.testing.assert_array_equal(shifted.interior[:, 0], np.roll(field.interior[:, 0], 3))
    rolled = np.roll(values, 3)
    np.testing.assert_array_equal(shifted.values[:, 0], np.concatenate([rolled[-2:], rolled, rolled[:2]]))
    np.testing.assert_array_equal(field.values[:, 0], np.concatenate([values[-2:], values, values[:2]]))

def test_init_averages_of_sine():
    grid = mesh.make_grid(-1, 1, 40)
    field = mesh.init_averages(grid, lambda x: np.sin(np.pi * x), quad_order=mesh.quadrature_nodes(5))
    edges = grid.edges
    exact = (np.cos(np.pi * edges[:-1]) - np.cos(np.pi * edges[1:])) / (np.pi * grid.h)
    np.testing.assert_allclose(field.interior[:, 0], exact, atol=1e-13)

def test_fill_ghosts_extrapolate():
    grid = mesh.make_grid(0, 1, 5, ghost=2)
    field = mesh.CellField(grid)
    field.values[grid.interior, 0] = np.arange(5)
    assert mesh.fill_ghosts(field, mesh.EXTRAPOLATE) is field
    np.testing.assert_array_equal(field.values[:, 0], [0, 0, 0, 1, 2, 3, 4, 4, 4])

def test_fill_ghosts_unknown_condition():
    grid = mesh.make_grid(0, 1, 5, ghost=1)
    with pytest.raises(mesh.x_mesh):
        mesh.fill_ghosts(mesh.CellField(grid), "reflect")

def test_cell_field_shape_is_checked():
    grid = mesh.make_grid(0, 1, 5, ghost=1)
    with pytest.raises(mesh.x_mesh):
        mesh.CellField(grid, 1, np.zeros(5))

def test_copy_is_independent():
    grid = mesh.make_grid(0, 1, 5)
    field = mesh.init_averages(grid, np.sin)
    copy = field.copy()
    copy.values[:] = 0
    assert field.is_finite() and np.any(field.values != 0)
