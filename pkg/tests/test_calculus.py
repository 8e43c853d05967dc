import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schcalc.calculus import (
    FourierDecomposition,
    FractionalOrder,
    GridFunction,
    OracleMismatchError,
    SpacetimeField,
    TimeGrid,
    apply_function,
    classical_poisson_apply,
    constant_symbol,
    decompose,
    default_time_grid,
    eigendecompose,
    frac_deriv_poisson_spectral,
    frac_deriv_quadrature,
    frac_power_neg,
    frac_power_pos,
    fractional_power,
    free_decomposition,
    heat_apply,
    heat_kernel,
    indicator_symbol,
    laplace_multiplier,
    laplace_multiplier_semigroup_route,
    log_time_tails,
    oscillating_symbol,
    poisson_derivative_kernel,
    poisson_kernel,
    poisson_spectral,
    poisson_subordination,
    q_kernel,
    square_function_constant,
)
from schcalc.lattice import PeriodicGrid, build_operator, constant_potential, quadratic_potential


@pytest.fixture(scope="module")
def quad():
    g = PeriodicGrid(128, 8.0)
    return eigendecompose(build_operator(g, quadratic_potential(g)))


@pytest.fixture(scope="module")
def const():
    g = PeriodicGrid(64, 4.0)
    return eigendecompose(build_operator(g, constant_potential(g, 1.5)))


def _random(spec, seed=1):
    return np.random.default_rng(seed).standard_normal(spec.grid.n_points)


def _maxdiff(a, b):
    return float(np.max(np.abs(np.asarray(getattr(a, "samples", a)) - np.asarray(getattr(b, "samples", b)))))


# --- containers -------------------------------------------------------------


def test_grid_function_norms():
    g = PeriodicGrid(16, 2.0)
    f = GridFunction(np.full(16, -3.0), g)
    assert f.sup_norm() == 3.0
    assert f.l1_norm() == pytest.approx(6.0)
    assert f.l2_norm() == pytest.approx(3.0 * math.sqrt(2.0))
    assert (f + f).sup_norm() == 6.0 and (f - f).sup_norm() == 0.0 and (2 * f).sup_norm() == 6.0
    with pytest.raises(ValueError):
        GridFunction(np.zeros(15), g)


def test_time_grid():
    tg = TimeGrid(1e-3, 10.0, 33)
    assert np.all(np.diff(tg.points) > 0)
    assert tg.points[0] == pytest.approx(1e-3) and tg.points[-1] == pytest.approx(10.0)
    assert tg.weights.sum() == pytest.approx(math.log(1e4))
    with pytest.raises(ValueError):
        TimeGrid(0.0, 1.0)
    d = default_time_grid(PeriodicGrid(16, 2 * math.pi))
    assert (d.t_min, d.t_max, d.count) == pytest.approx((1e-3, 10.0, 64))


def test_spacetime_field_validation():
    g = PeriodicGrid(16, 1.0)
    tg = TimeGrid(0.1, 1.0, 4)
    SpacetimeField(np.zeros((16, 4)), g, tg)
    with pytest.raises(ValueError):
        SpacetimeField(np.zeros((16, 3)), g, tg)
    bad = np.zeros((16, 4))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        SpacetimeField(bad, g, tg)


@pytest.mark.parametrize("beta,m", [(0.5, 1), (1.0, 2), (1.7, 2), (2.0, 3)])
def test_fractional_order(beta, m):
    order = FractionalOrder(beta)
    assert order.m == m
    assert 0 < order.m - beta <= 1
    assert abs(order.phase) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        FractionalOrder(0.0)


def test_integer_phase_is_exact():
    assert FractionalOrder(1.0).phase == -1
    assert FractionalOrder(2.0).phase == 1


# --- eigensystems -----------------------------------------------------------


def test_eigendecompose_invariants(quad):
    g = quad.grid
    e = quad.eigenvectors
    assert np.max(np.abs(g.spacing * e.T @ e - np.eye(g.n_points))) <= 1e-10
    resid = np.linalg.norm(quad.operator.matrix @ e - e * quad.eigenvalues, axis=0) * math.sqrt(g.spacing)
    assert resid.max() <= 1e-8 * max(1.0, quad.eigenvalues[-1])
    assert quad.ground_energy > 0
    assert np.all(np.diff(quad.eigenvalues) >= 0)


def test_constant_spectrum_closed_form():
    g = PeriodicGrid(64, 5.0)
    spec = eigendecompose(build_operator(g, constant_potential(g, 0.3)))
    k = np.arange(64)
    closed = np.sort(4 / g.spacing**2 * np.sin(np.pi * k / 64) ** 2 + 0.3)
    assert np.max(np.abs(spec.eigenvalues - closed) / closed) <= 1e-10


def test_parseval(quad):
    f = _random(quad)
    c = quad.coefficients(f)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(quad.grid.spacing * np.sum(f**2), rel=1e-10)


def test_fourier_matches_dense():
    g = PeriodicGrid(64, 4.0)
    dense = eigendecompose(build_operator(g, constant_potential(g, 2.0)))
    fourier = FourierDecomposition(g, 2.0)
    assert np.allclose(dense.eigenvalues, fourier.eigenvalues, rtol=1e-12)
    f = _random(dense)
    for t in (0.05, 1.0):
        assert _maxdiff(heat_apply(dense, t, f), heat_apply(fourier, t, f)) < 1e-11
        assert _maxdiff(poisson_spectral(dense, t, f), poisson_spectral(fourier, t, f)) < 1e-11
    assert np.allclose(heat_kernel(dense, 0.3), heat_kernel(fourier, 0.3), atol=1e-11)
    assert np.allclose(fourier.synthesize(fourier.coefficients(f)), f)


def test_fourier_eigenvectors_and_guard():
    g = PeriodicGrid(32, 2.0)
    spec = FourierDecomposition(g, 1.0)
    e = spec.eigenvectors
    assert np.allclose(g.spacing * e.conj().T @ e, np.eye(32), atol=1e-12)
    assert np.allclose(e[:, 5], spec.eigenvector(5))
    with pytest.raises(MemoryError):
        FourierDecomposition(PeriodicGrid(8192, 1.0), 1.0).eigenvectors


def test_decompose_backends():
    big = PeriodicGrid(2048, 4.0)
    assert isinstance(decompose(big, constant_potential(big, 1.0)), FourierDecomposition)
    small = PeriodicGrid(32, 4.0)
    assert not isinstance(decompose(small, constant_potential(small, 1.0)), FourierDecomposition)
    with pytest.raises(ValueError):
        decompose(small, quadratic_potential(small), "fourier")
    with pytest.raises(ValueError):
        decompose(small, quadratic_potential(small), "lanczos")


# --- functional calculus ------------------------------------------------------


def test_apply_function_examples(quad):
    f = _random(quad)
    assert _maxdiff(apply_function(quad, np.ones_like, f), f) < 1e-12
    lf = quad.operator.matrix @ f
    assert _maxdiff(apply_function(quad, lambda lam: lam, f), lf) <= 1e-8 * np.max(np.abs(lf))
    e3 = quad.eigenvector(3)
    out = apply_function(quad, lambda lam: np.exp(-lam), e3)
    assert _maxdiff(out, math.exp(-quad.eigenvalues[3]) * e3) < 1e-12
    with pytest.raises(ValueError), np.errstate(divide="ignore"):
        apply_function(quad, lambda lam: 1 / (lam - lam[0]), f)


def test_heat_semigroup(quad, const):
    f = _random(quad)
    assert _maxdiff(heat_apply(quad, 0.0, f), f) < 1e-12
    assert _maxdiff(heat_apply(quad, 0.2, heat_apply(quad, 0.3, f)), heat_apply(quad, 0.5, f)) < 1e-10
    ones = np.ones(const.grid.n_points)
    assert _maxdiff(heat_apply(const, 0.7, ones), math.exp(-0.7 * 1.5) * ones) < 1e-12


def test_contraction(quad):
    f = GridFunction(_random(quad), quad.grid)
    lam0 = quad.ground_energy
    for t in (0.01, 0.5, 3.0):
        assert heat_apply(quad, t, f).l2_norm() <= math.exp(-t * lam0) * f.l2_norm() * (1 + 1e-12)
        assert poisson_spectral(quad, t, f).l2_norm() <= math.exp(-t * math.sqrt(lam0)) * f.l2_norm() * (1 + 1e-12)


def test_poisson_spectral_examples(quad):
    f = _random(quad)
    assert _maxdiff(poisson_spectral(quad, 0.0, f), f) < 1e-12
    e = quad.eigenvector(4)
    assert _maxdiff(poisson_spectral(quad, 0.6, e), math.exp(-0.6 * math.sqrt(quad.eigenvalues[4])) * e) < 1e-12


def test_poisson_solves_wave_equation(quad):
    f = quad.eigenvector(0) + quad.eigenvector(2)
    t, d = 0.8, 1e-3
    second = (poisson_spectral(quad, t + d, f).samples - 2 * poisson_spectral(quad, t, f).samples + poisson_spectral(quad, t - d, f).samples) / d**2
    lpf = quad.operator.matrix @ poisson_spectral(quad, t, f).samples
    assert np.max(np.abs(second - lpf)) < 1e-4 * np.max(np.abs(lpf))


def test_classical_poisson():
    g = PeriodicGrid(64, 4.0)
    ones = np.ones(64)
    assert _maxdiff(classical_poisson_apply(g, 0.0, ones), ones) < 1e-12
    assert _maxdiff(classical_poisson_apply(g, 3.0, ones), ones) < 1e-12
    mode = np.cos(2 * np.pi * 3 * g.coordinates / g.period)
    lam = 4 / g.spacing**2 * math.sin(math.pi * 3 / 64) ** 2
    assert _maxdiff(classical_poisson_apply(g, 0.4, mode), math.exp(-0.4 * math.sqrt(lam)) * mode) < 1e-12


# --- quadrature routes --------------------------------------------------------


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_subordination_matches_spectral(quad, t):
    f = _random(quad)
    assert _maxdiff(poisson_subordination(quad, t, f), poisson_spectral(quad, t, f)) <= 1e-6 * np.max(np.abs(f))


def test_subordination_constant_and_semigroup(const, quad):
    ones = np.ones(const.grid.n_points)
    assert _maxdiff(poisson_subordination(const, 1.0, ones), math.exp(-math.sqrt(1.5)) * ones) < 1e-6
    f = _random(quad)
    two = poisson_subordination(quad, 0.3, poisson_subordination(quad, 0.4, f))
    assert _maxdiff(two, poisson_spectral(quad, 0.7, f)) <= 2e-6 * np.max(np.abs(f))


def test_validation_raises_on_starved_quadrature(quad):
    with pytest.raises(OracleMismatchError):
        poisson_subordination(quad, 1.0, _random(quad), quad_points=8, validate=True, tol=1e-12)


def test_integer_derivatives(quad):
    f = _random(quad)
    lam, c = quad.eigenvalues, quad.coefficients(f)
    t = 0.4
    d1 = quad.synthesize(-np.sqrt(lam) * np.exp(-t * np.sqrt(lam)) * c)
    d2 = quad.synthesize(lam * np.exp(-t * np.sqrt(lam)) * c)
    assert _maxdiff(frac_deriv_poisson_spectral(quad, FractionalOrder(1), t, f), d1) < 1e-10
    assert _maxdiff(frac_deriv_poisson_spectral(quad, FractionalOrder(2), t, f), d2) < 1e-9
    out = frac_deriv_poisson_spectral(quad, FractionalOrder(1), t, f)
    assert not np.iscomplexobj(out.samples)


def test_half_derivative_modulus(quad):
    k = 5
    out = frac_deriv_poisson_spectral(quad, FractionalOrder(0.5), 1.0, quad.eigenvector(k))
    lam = quad.eigenvalues[k]
    expect = lam**0.25 * math.exp(-math.sqrt(lam)) * np.abs(quad.eigenvector(k))
    assert np.allclose(np.abs(out.samples), expect, atol=1e-12)


@pytest.mark.parametrize("beta", [0.5, 1.5, 2.7])
def test_segovia_wheeden_matches_spectral(quad, beta):
    f = _random(quad)
    order = FractionalOrder(beta)
    approx = frac_deriv_quadrature(quad, order, 1.0, f, quad_points=512)
    assert _maxdiff(approx, frac_deriv_poisson_spectral(quad, order, 1.0, f)) <= 1e-5 * np.max(np.abs(f))
    assert _maxdiff(frac_deriv_quadrature(quad, order, 1.0, np.zeros_like(f)), np.zeros_like(f)) == 0


def test_negative_power(quad):
    e = quad.eigenvector(3)
    lam = quad.eigenvalues[3]
    for sigma in (0.4, 1.3):
        assert _maxdiff(frac_power_neg(quad, sigma, e), lam ** (-sigma / 2) * e) < 1e-6
    f = _random(quad)
    both = frac_power_neg(quad, 0.3, frac_power_neg(quad, 0.5, f))
    assert _maxdiff(both, frac_power_neg(quad, 0.8, f)) < 1e-5
    with pytest.raises(ValueError):
        frac_power_neg(quad, 2.0, f)
    with pytest.raises(ValueError):
        frac_power_neg(free_decomposition(quad.grid), 0.5, f)


def test_positive_power(quad, const):
    e = quad.eigenvector(6)
    lam = quad.eigenvalues[6]
    assert _maxdiff(frac_power_pos(quad, 0.6, e), lam**0.3 * e) < 1e-5
    ones = np.ones(const.grid.n_points)
    assert _maxdiff(frac_power_pos(const, 0.5, ones), 1.5**0.25 * ones) < 1e-5
    f = GridFunction(_random(quad), quad.grid)
    back = frac_power_pos(quad, 0.4, frac_power_neg(quad, 0.4, f))
    assert (back - f).l2_norm() <= 1e-5 * f.l2_norm()
    assert frac_power_pos(quad, 0.4, np.zeros(quad.grid.n_points)).sup_norm() == 0


def test_powers_commute_with_poisson(quad):
    f = _random(quad)
    a = poisson_spectral(quad, 0.5, frac_power_neg(quad, 0.7, f))
    b = frac_power_neg(quad, 0.7, poisson_spectral(quad, 0.5, f))
    assert _maxdiff(a, b) < 1e-10


def test_power_routes_validate(quad):
    f = _random(quad)
    frac_power_neg(quad, 1.1, f, validate=True)
    frac_power_pos(quad, 0.7, f, validate=True)
    assert _maxdiff(fractional_power(quad, 0.0, f), f) < 1e-12


def test_laplace_multiplier_examples(quad):
    f = _random(quad)
    assert _maxdiff(laplace_multiplier(quad, constant_symbol(1.0), f), f) < 1e-6
    assert laplace_multiplier(quad, constant_symbol(0.0), f).sup_norm() == 0
    T = 0.8
    expect = f - poisson_spectral(quad, T, f).samples
    assert _maxdiff(laplace_multiplier(quad, indicator_symbol(T), f, check_routes=True), expect) < 1e-6
    lam = quad.eigenvalues
    cos = quad.synthesize(lam / (lam + 4.0) * quad.coefficients(f))
    assert _maxdiff(laplace_multiplier(quad, oscillating_symbol(2.0), f), cos) < 1e-6


def test_laplace_routes_agree(quad):
    f = _random(quad, 3)
    a = oscillating_symbol(1.3)
    assert _maxdiff(laplace_multiplier(quad, a, f), laplace_multiplier_semigroup_route(quad, a, f)) < 1e-6


# --- kernels -----------------------------------------------------------------


def test_heat_kernel_properties(quad, const):
    k = heat_kernel(quad, 0.2)
    assert np.max(np.abs(k - k.T)) < 1e-12
    assert k.min() >= -1e-12
    f = _random(quad)
    assert _maxdiff(quad.grid.spacing * k @ f, heat_apply(quad, 0.2, f)) < 1e-12
    kc = heat_kernel(const, 0.5)
    assert np.allclose(const.grid.spacing * kc.sum(axis=1), math.exp(-0.75), atol=1e-13)


def test_heat_kernel_periodized_gaussian():
    g = PeriodicGrid(1 << 16, 8.0)
    spec = FourierDecomposition(g, 1.0)
    d = g.coordinates  # distances to the origin node
    near = np.abs(d) <= g.period / 4
    for t in (0.1, 0.5, 1.0):
        row = heat_kernel(spec, t, rows=[g.origin_index])[0]
        gauss = sum(np.exp(-((d + m * g.period) ** 2) / (4 * t)) for m in range(-3, 4)) / math.sqrt(4 * math.pi * t)
        assert np.max(np.abs(row[near] / (math.exp(-t) * gauss[near]) - 1)) <= 1e-6


def test_poisson_kernel_properties(quad, const):
    pk = poisson_kernel(quad, 0.3)
    assert not np.iscomplexobj(pk)
    assert np.max(np.abs(pk - pk.T)) < 1e-12
    assert pk.min() >= -1e-12
    f = _random(quad)
    assert _maxdiff(quad.grid.spacing * pk @ f, poisson_spectral(quad, 0.3, f)) < 1e-12
    rows = const.grid.spacing * poisson_kernel(const, 0.9).sum(axis=1)
    assert np.allclose(rows, math.exp(-0.9 * math.sqrt(1.5)), atol=1e-13)


def test_q_kernel(quad, const):
    t, d = 0.5, 1e-4
    fd = t**2 * (heat_kernel(quad, t**2 + d) - heat_kernel(quad, t**2 - d)) / (2 * d)
    assert np.max(np.abs(q_kernel(quad, t) - fd)) < 1e-6 * np.max(np.abs(fd))
    rows = const.grid.spacing * q_kernel(const, t).sum(axis=1)
    assert np.allclose(rows, -(t**2) * 1.5 * math.exp(-(t**2) * 1.5), atol=1e-13)
    free = free_decomposition(PeriodicGrid(64, 4.0))
    assert np.allclose(free.grid.spacing * q_kernel(free, t).sum(axis=1), 0.0, atol=1e-13)


def test_poisson_derivative_kernel_row_sums(const):
    mu = 1.5
    for beta in (1.0, 0.5, 1.7):
        order = FractionalOrder(beta)
        rows = const.grid.spacing * poisson_derivative_kernel(const, order, 0.6).sum(axis=1)
        closed = order.phase * (0.6 * math.sqrt(mu)) ** beta * math.exp(-0.6 * math.sqrt(mu))
        assert np.allclose(rows, closed, atol=1e-12)


# --- square-function identities ---------------------------------------------


def test_square_function_constant():
    assert square_function_constant(1.0) == pytest.approx(0.25)
    assert square_function_constant(0.5) == pytest.approx(0.5)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 1e4), st.floats(0.3, 2.5))
def test_window_plus_tails_is_the_full_integral(lam, beta):
    tg = TimeGrid(1e-3, 10.0, 400)
    t = tg.points
    root = math.sqrt(lam)
    window = np.sum(tg.weights * t ** (2 * beta) * lam**beta * np.exp(-2 * t * root))
    tails = float(log_time_tails(np.array(2 * root), np.array(lam), beta, tg))
    assert window + tails == pytest.approx(square_function_constant(beta), rel=1e-3)


@settings(max_examples=20, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 2.0))
def test_multipliers_are_linear(scale, t):
    g = PeriodicGrid(32, 4.0)
    spec = FourierDecomposition(g, 1.0)
    f = np.sin(2 * np.pi * g.coordinates / 4.0) + 0.3
    a = poisson_spectral(spec, t, scale * f).samples
    b = scale * poisson_spectral(spec, t, f).samples
    assert np.allclose(a, b, atol=1e-12 * max(1.0, abs(scale)))
