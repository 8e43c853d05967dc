import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schcalc.calculus import FourierDecomposition, FractionalOrder, GridFunction, TimeGrid, eigendecompose
from schcalc.lattice import (
    BallFamily,
    PeriodicGrid,
    build_operator,
    constant_potential,
    critical_radius_field,
    quadratic_potential,
)
from schcalc.regularity import (
    area_function_sbeta,
    ball_mean,
    ball_means,
    bmo_alpha_norm,
    carleson_functional,
    growth_profile,
    holder_norm,
    holder_seminorm,
    poisson_derivative_field,
    rho_growth_seminorm,
    second_difference_constant,
    square_function_gbeta,
    streamed_growth_profile,
    sup_growth_constant,
    tent_growth_bound,
)
from schcalc.testfns import holder_cusp, random_smooth


@pytest.fixture(scope="module")
def quad():
    g = PeriodicGrid(128, 8.0)
    return eigendecompose(build_operator(g, quadratic_potential(g)))


def test_holder_seminorm_of_cusp():
    g = PeriodicGrid(128, 4.0)
    f = holder_cusp(g, 0.5)
    # the cusp attains its Hölder constant 1 between 0 and any point
    assert holder_seminorm(f, 0.5) == pytest.approx(1.0, rel=1e-12)
    assert holder_seminorm(GridFunction(np.zeros(128), g), 0.5) == 0


def test_holder_seminorm_brute_force():
    g = PeriodicGrid(32, 2.0)
    f = random_smooth(g, seed=1, cutoff=4)
    x, v = g.coordinates, f.samples
    brute = max(
        abs(v[i] - v[j]) / g.periodic_distance(x[i], x[j]) ** 0.7 for i in range(32) for j in range(32) if i != j
    )
    assert holder_seminorm(f, 0.7) == pytest.approx(brute, rel=1e-12)


def test_second_difference_of_linear_cosine():
    g = PeriodicGrid(64, 2 * math.pi)
    f = GridFunction(np.cos(g.coordinates), g)
    # |cos(x+y) + cos(x-y) - 2cos x| = 2|cos x|(1 - cos y) <= 2 (1 - cos y), / |y|^2 -> 1 as y -> 0
    val = second_difference_constant(f, 2.0)
    assert 0.9 < val <= 1.0


@settings(max_examples=20, deadline=None)
@given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
def test_functionals_are_absolutely_homogeneous(c):
    g = PeriodicGrid(64, 8.0)
    f = random_smooth(g, seed=2, cutoff=5)
    cf = GridFunction(c * f.samples, g)
    rho = critical_radius_field(g, quadratic_potential(g))
    balls = BallFamily.dyadic(g)
    assert holder_seminorm(cf, 0.5) == pytest.approx(abs(c) * holder_seminorm(f, 0.5), rel=1e-10)
    assert rho_growth_seminorm(cf, 0.5, rho) == pytest.approx(abs(c) * rho_growth_seminorm(f, 0.5, rho), rel=1e-10)
    assert bmo_alpha_norm(cf, 0.5, balls, rho) == pytest.approx(abs(c) * bmo_alpha_norm(f, 0.5, balls, rho), rel=1e-10)


def test_holder_norm_report():
    g = PeriodicGrid(64, 8.0)
    rho = critical_radius_field(g, quadratic_potential(g))
    f = random_smooth(g)
    rep = holder_norm(f, 0.5, rho)
    assert rep.total == pytest.approx(rep.holder_seminorm + rep.growth_seminorm)
    assert rep.growth_seminorm == pytest.approx(rho_growth_seminorm(f, 0.5, rho))
    i, j = rep.attaining_pair
    d = g.periodic_distance(g.coordinates[i], g.coordinates[j])
    assert abs(f.samples[i] - f.samples[j]) / d**0.5 == pytest.approx(rep.holder_seminorm)


def test_ball_means():
    g = PeriodicGrid(64, 4.0)
    ones = GridFunction(np.ones(64), g)
    assert ball_mean(ones, 10, 0.33) == pytest.approx(1.0)
    balls = BallFamily.dyadic(g)
    assert np.allclose(ball_means(ones, balls), 1.0)
    f = random_smooth(g)
    means = ball_means(f, balls)
    for pos in (0, len(balls) // 2, len(balls) - 1):
        c, r = list(balls)[pos]
        assert means[pos] == pytest.approx(ball_mean(f, c, r))


def test_bmo_of_constant():
    g = PeriodicGrid(64, 8.0)
    v = constant_potential(g, 1.0)
    rho = critical_radius_field(g, v)
    balls = BallFamily.dyadic(g)
    ones = GridFunction(np.ones(64), g)
    # no oscillation; the mean term appears on balls at least as large as rho
    big = [r for _, r in balls if r >= rho.values[0]]
    expected = max(1.0 / (2 * r) ** 0.5 for r in big)
    assert bmo_alpha_norm(ones, 0.5, balls, rho) == pytest.approx(expected)
    with pytest.raises(ValueError):
        bmo_alpha_norm(ones, 1.5, balls, rho)


def test_poisson_derivative_field_and_profiles(quad):
    f = random_smooth(quad.grid)
    tg = TimeGrid(1e-2, 2.0, 16)
    order = FractionalOrder(1.5)
    field = poisson_derivative_field(quad, order, f, tg)
    assert field.values.shape == (128, 16)
    prof = growth_profile(field)
    assert np.allclose(prof, streamed_growth_profile(quad, order, f, tg), rtol=1e-12)
    assert sup_growth_constant(field, 0.5) == pytest.approx(float(np.max(prof * tg.points**-0.5)))


def test_carleson_bounded_by_growth(quad):
    f = holder_cusp(quad.grid, 0.5)
    tg = TimeGrid(1e-3, 4.0, 48)
    field = poisson_derivative_field(quad, FractionalOrder(1.0), f, tg)
    balls = BallFamily.dyadic(quad.grid)
    rep = carleson_functional(field, 0.5, balls)
    growth = sup_growth_constant(field, 0.5)
    per_ball_bound = np.array([tent_growth_bound(tg, 0.5, r) for _, r in balls]) * growth
    ok = ~np.isnan(rep.per_ball)
    assert np.all(rep.per_ball[ok] <= per_ball_bound[ok] * (1 + 1e-10))
    assert rep.supremum == pytest.approx(np.nanmax(rep.per_ball))
    assert rep.attaining_ball is not None


def test_empty_tents_reported():
    g = PeriodicGrid(64, 8.0)
    spec = FourierDecomposition(g, 1.0)
    tg = TimeGrid(1.0, 2.0, 4)
    field = poisson_derivative_field(spec, FractionalOrder(1.0), random_smooth(g), tg)
    rep = carleson_functional(field, 0.5, BallFamily(g, ((0, 0.5),)))
    assert rep.empty_tents == 1 and rep.supremum == 0.0 and rep.attaining_ball is None


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.7])
def test_square_function_isometry(quad, beta):
    f = random_smooth(quad.grid, seed=5)
    tg = TimeGrid(1e-3, 10.0, 64)
    g = square_function_gbeta(quad, beta, f, tg)
    assert g.l2_norm() ** 2 == pytest.approx(math.gamma(2 * beta) / 4**beta * f.l2_norm() ** 2, rel=1e-3)


def test_area_function_is_root_two_square_function():
    grid = PeriodicGrid(256, 8.0)
    spec = FourierDecomposition(grid, 1.0)
    f = random_smooth(grid, seed=1, cutoff=6)
    tg = TimeGrid(1e-3, 2.0, 96)
    s = area_function_sbeta(spec, 1.0, f, tg)
    g = square_function_gbeta(spec, 1.0, f, tg, tails=False)
    assert s.l2_norm() == pytest.approx(math.sqrt(2) * g.l2_norm(), rel=0.05)
