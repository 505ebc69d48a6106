import numpy as np
import pytest

from cwenolab import mesh
from cwenolab import models
from cwenolab import recon
from cwenolab import solver

LAX_PLATEAUX = (0.445, 0.345, 1.304, 0.5)


def total_variation(values):
    return float(np.abs(np.diff(values)).sum())

def finite_difference_jacobian(model, u, step=1e-6):
    columns = []
    for i in range(len(u)):
        du = np.zeros_like(u)
        du[i] = step
        columns.append((model.flux((u + du)[None, :])[0] - model.flux((u - du)[None, :])[0]) / (2 * step))
    return np.stack(columns, axis=-1)


#
# Advection and initial data
#
def test_advection_flux():
    model = models.advection_model()
    assert model.flux(np.array([[3.0]]))[0, 0] == 3.0
    np.testing.assert_array_equal(model.max_wavespeed(np.zeros((4, 1))), 1.0)

def test_smooth_data():
    x = np.array([-0.5, 0.0, 0.25])
    np.testing.assert_allclose(
        models.smooth_data(x), np.sin(np.pi * x) - np.sin(15 * np.pi * x) * np.exp(-20 * x ** 2)
    )

def test_ellipse_data_support():
    assert models.ellipse_data(0.5) == pytest.approx(1.0, abs=1e-3)
    assert models.ellipse_data(0.0) == 0.0
    assert models.ellipse_data(0.7) == 0.0

@pytest.mark.parametrize("x", [-0.95, -0.5, -0.1, 0.3, 0.8])
def test_jiangshu_zero_between_features(x):
    assert models.jiangshu_composite_data(x) == 0.0

def test_jiangshu_features():
    assert models.jiangshu_composite_data(-0.3) == 1.0
    assert models.jiangshu_composite_data(0.1) == pytest.approx(1.0)
    assert models.jiangshu_composite_data(0.15) == pytest.approx(0.5)
    assert models.jiangshu_composite_data(-0.7) == pytest.approx(1.0, abs=0.01)
    assert models.jiangshu_composite_data(0.5) == pytest.approx(1.0, abs=1e-3)

def test_jiangshu_bounded():
    u = models.jiangshu_composite_data(np.linspace(-1, 1, 10001))
    assert u.min() >= -0.05 and u.max() <= 1.05

@pytest.mark.parametrize("key", list(models.PROBLEMS))
def test_initial_data_is_pure(key):
    problem = models.problem_from_key(key)
    x = np.linspace(*problem.domain, 101)
    np.testing.assert_array_equal(problem.initial(x), problem.initial(x))

def test_registry_keys():
    assert list(models.PROBLEMS) == [
        "advection-smooth17", "advection-jiangshu", "advection-ellipse18",
        "euler-lax", "euler-shuosher", "swe-smooth19",
    ]
    with pytest.raises(models.x_unknown_problem):
        models.problem_from_key("burgers")

def test_eps_rule_for_measures_h_in_domain_lengths():
    smooth = models.problem_from_key("advection-smooth17")
    assert models.eps_rule_for(smooth, 3) == (0.5, 1.0)
    assert models.eps_rule_for(smooth, 5) == (0.25, 2.0)
    assert models.eps_rule_for(smooth, 5, (1e-6, 0.0)) == (1e-6, 0.0)
    lax = models.problem_from_key("euler-lax")
    assert models.eps_rule_for(lax, 3) == pytest.approx((0.01, 2.0))
    #
    # The resulting eps on the grid is the rule applied to h / length
    #
    c, p = models.eps_rule_for(lax, 5)
    h = 10.0 / 200
    assert c * h ** p == pytest.approx((h / 10.0) ** 2)

def test_transport_after_whole_periods_is_initial_data():
    problem = models.problem_from_key("advection-jiangshu")
    x = np.linspace(-1, 1, 401)[:-1] + 0.0025
    np.testing.assert_allclose(problem.exact(x, 8.0), problem.initial(x), atol=1e-12)


#
# Euler
#
def test_euler_conversions():
    model = models.euler_model()
    u = model.conservative(0.445, 0.6989, 3.5277)
    rho, velocity, pressure = model.primitive(u)
    assert (rho, velocity, pressure) == pytest.approx((0.445, 0.6989, 3.5277))
    assert u[2] == pytest.approx(3.5277 / 0.4 + 0.5 * 0.445 * 0.6989 ** 2)

def test_euler_flux_and_wavespeed():
    model = models.euler_model()
    u = model.conservative(1.0, 2.0, 1.0)[None, :]
    np.testing.assert_allclose(model.flux(u)[0], [2.0, 5.0, 2.0 * (2.5 + 2.0 + 1.0)])
    assert model.max_wavespeed(u)[0] == pytest.approx(2.0 + np.sqrt(1.4))

@pytest.mark.parametrize("state", [(-1.0, 0.0, 1.0), (1.0, 0.0, -1.0), (0.0, 0.0, 1.0)])
def test_euler_rejects_inadmissible(state):
    with pytest.raises(solver.x_inadmissible_state):
        models.euler_model().check_admissible(np.array([state]))

def test_euler_eigenvectors():
    model = models.euler_model()
    rng = np.random.default_rng(1)
    u = model.conservative(rng.uniform(0.5, 5, 100), rng.uniform(-3, 3, 100), rng.uniform(0.5, 5, 100))
    left, right = model.eigen_decomposition(u)
    np.testing.assert_allclose(left @ right, np.broadcast_to(np.eye(3), (100, 3, 3)), atol=1e-12)

    rho, velocity, pressure = model.primitive(u[:5])
    c = model.sound_speed(rho, pressure)
    for i in range(5):
        diagonal = left[i] @ finite_difference_jacobian(model, u[i]) @ right[i]
        np.testing.assert_allclose(diagonal, np.diag([velocity[i] - c[i], velocity[i], velocity[i] + c[i]]), atol=1e-6)

def test_lax_initial_state():
    problem = models.problem_from_key("euler-lax")
    scheme = recon.ReconScheme(recon.CWENOZ, 5)
    field = models.initial_field(problem, scheme)
    rho, velocity, pressure = problem.model.primitive(field.interior)
    assert field.grid.M == 200 and field.grid.ghost == 3
    assert (rho[0], velocity[0], pressure[0]) == pytest.approx((0.445, 0.6989, 3.5277))
    assert (rho[-1], velocity[-1], pressure[-1]) == pytest.approx((0.5, 0.0, 0.571))


#
# Shallow water
#
def flat_swe():
    return models.swe_model(lambda x: np.zeros_like(x), lambda x: np.zeros_like(x))

def test_swe_flux_and_wavespeed():
    model = flat_swe()
    u = np.array([[2.0, 1.0]])
    np.testing.assert_allclose(model.flux(u)[0], [1.0, 0.5 + 0.5 * models.GRAVITY * 4.0])
    assert model.max_wavespeed(u)[0] == pytest.approx(0.5 + np.sqrt(models.GRAVITY * 2.0))
    assert model.g == 9.812
    assert models.swe_model(np.sin, np.cos, g=1.0).g == 1.0

def test_swe_rejects_dry_state():
    with pytest.raises(solver.x_inadmissible_state):
        flat_swe().check_admissible(np.array([[0.0, 1.0]]))

def test_swe_eigenvectors():
    model = flat_swe()
    rng = np.random.default_rng(2)
    u = np.stack([rng.uniform(0.5, 5, 50), rng.uniform(-2, 2, 50)], axis=-1)
    left, right = model.eigen_decomposition(u)
    np.testing.assert_allclose(left @ right, np.broadcast_to(np.eye(2), (50, 2, 2)), atol=1e-12)

def test_flat_bottom_has_no_source():
    model = flat_swe()
    coeffs = np.zeros((4, 2, 5))
    coeffs[:, 0, 0] = 3.0
    np.testing.assert_array_equal(model.source_average(coeffs, np.linspace(0, 1, 4), 0.25, 5), 0.0)
    np.testing.assert_array_equal(model.source(np.array([[3.0, 1.0]]), np.array([0.2])), 0.0)

def test_romberg_levels_are_exact():
    assert models.romberg_trapezoid(lambda xi: xi ** 2, 2) == pytest.approx(1 / 12, abs=1e-15)
    assert models.romberg_trapezoid(lambda xi: 3 * xi ** 3 + xi ** 2 - 1, 2) == pytest.approx(1 / 12 - 1, abs=1e-14)
    assert models.romberg_trapezoid(lambda xi: xi ** 4, 3) == pytest.approx(1 / 80, abs=1e-15)
    assert models.romberg_trapezoid(lambda xi: xi ** 8, 5) == pytest.approx(1 / 2304, abs=1e-15)

def _source_error(h, order, x0=0.3):
    slope = lambda x: np.pi * np.sin(2 * np.pi * x)
    average = models.swe_source_average([[1.0]], [x0], h, slope, order, g=1.0)[0]
    exact = (np.cos(2 * np.pi * (x0 + h / 2)) - np.cos(2 * np.pi * (x0 - h / 2))) / (2 * h)
    return abs(average - exact)

@pytest.mark.parametrize("order", [3, 5, 7])
def test_source_quadrature_order(order):
    assert np.log2(_source_error(0.1, order) / _source_error(0.05, order)) >= order - 0.3

def test_swe_conserves_mass():
    problem = models.problem_from_key("swe-smooth19")
    scheme = recon.ReconScheme(recon.CWENOZ, 3)
    field0 = models.initial_field(problem, scheme, 32)
    config = solver.SolverConfig(scheme, bc=problem.bc, t_end=problem.t_end)
    field, _ = solver.advance(problem.model, field0, config)
    assert field.total()[0] == pytest.approx(field0.total()[0], abs=1e-11)
    assert not np.allclose(field.interior[:, 1], field0.interior[:, 1])

def test_swe_needs_a_polynomial_reconstruction():
    problem = models.problem_from_key("swe-smooth19")
    scheme = recon.ReconScheme(recon.WENO, 3)
    field0 = models.initial_field(problem, scheme, 16)
    with pytest.raises(solver.x_unsupported):
        solver.semidiscrete_rhs(problem.model, field0, solver.SolverConfig(scheme))

def test_swe_characteristic_reconstruction_runs():
    problem = models.problem_from_key("swe-smooth19")
    scheme = recon.ReconScheme(recon.CWENO, 3)
    field0 = models.initial_field(problem, scheme, 64)
    componentwise = solver.semidiscrete_rhs(problem.model, field0, solver.SolverConfig(scheme))
    characteristic = solver.semidiscrete_rhs(problem.model, field0, solver.SolverConfig(scheme, characteristic=True))
    assert np.all(np.isfinite(characteristic))
    assert np.max(np.abs(characteristic - componentwise)) < 0.05 * np.max(np.abs(componentwise))


#
# Shock tubes
#
@pytest.mark.slow
@pytest.mark.parametrize("order", [3, 5])
def test_lax_tube(order):
    problem = models.problem_from_key("euler-lax")
    scheme = recon.ReconScheme(recon.CWENOZ, order, eps_rule=models.eps_rule_for(problem, order))
    field0 = models.initial_field(problem, scheme)
    config = solver.SolverConfig(scheme, bc=problem.bc, characteristic=True, t_end=problem.t_end)
    field, steps = solver.advance(problem.model, field0, config)
    rho = field.interior[:, 0]

    exact_tv = total_variation(LAX_PLATEAUX)
    assert total_variation(rho) < 1.05 * exact_tv
    assert rho.min() > 0.95 * min(LAX_PLATEAUX)
    assert rho.max() < 1.05 * max(LAX_PLATEAUX)

@pytest.mark.slow
def test_periodic_tube_conserves_totals():
    problem = models.problem_from_key("euler-lax")
    scheme = recon.ReconScheme(recon.CWENOZ, 3)
    field0 = models.initial_field(problem, scheme, 100)
    mesh.fill_ghosts(field0, mesh.PERIODIC)
    config = solver.SolverConfig(scheme, bc=mesh.PERIODIC, characteristic=True, t_end=0.5)
    field, _ = solver.advance(problem.model, field0, config)
    np.testing.assert_allclose(field.total(), field0.total(), atol=1e-10)

@pytest.mark.slow
@pytest.mark.parametrize("order", [3, 5])
def test_shu_osher(order):
    problem = models.problem_from_key("euler-shuosher")
    scheme = recon.ReconScheme(recon.CWENOZ, order, eps_rule=models.eps_rule_for(problem, order))
    field0 = models.initial_field(problem, scheme)
    config = solver.SolverConfig(scheme, bc=problem.bc, characteristic=True, t_end=problem.t_end)
    field, steps = solver.advance(problem.model, field0, config)
    assert field.is_finite()
    assert steps[-1].t == problem.t_end
    rho = field.interior[:, 0]
    assert 0.5 < rho.min() and rho.max() < 5.5
