"""Hölder, growth, BMO, Carleson, square- and area-function functionals.

Every functional takes moduli of complex inputs and is absolutely homogeneous
in ``f``.  Ball averages integrate the cell interpolant exactly (see
:mod:`schcalc.lattice`), so ``|B| = 2r`` is also the total weight of a ball.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .calculus import (
    FractionalOrder,
    GridFunction,
    SpacetimeField,
    SpectralDecomposition,
    TimeGrid,
    frac_deriv_multiplier,
    log_time_tails,
)
from .lattice import BallFamily, CriticalRadiusField, PeriodicGrid, subsample_shifts


def _samples(f) -> np.ndarray:
    return f.samples if isinstance(f, GridFunction) else np.asarray(f)


@dataclass(frozen=True)
class HolderReport:
    holder_seminorm: float
    growth_seminorm: float
    alpha: float
    attaining_pair: tuple[int, int]
    attaining_point: int

    @property
    def total(self) -> float:
        return self.holder_seminorm + self.growth_seminorm


@dataclass(frozen=True)
class CarlesonReport:
    per_ball: np.ndarray  # NaN where the tent is empty
    balls: tuple[tuple[int, float], ...]
    alpha: float
    beta: float
    empty_tents: int

    @property
    def supremum(self) -> float:
        if np.all(np.isnan(self.per_ball)):
            return 0.0
        return float(np.nanmax(self.per_ball))

    @property
    def attaining_ball(self) -> tuple[int, float] | None:
        if np.all(np.isnan(self.per_ball)):
            return None
        return self.balls[int(np.nanargmax(self.per_ball))]


# ---------------------------------------------------------------------------
# pointwise seminorms


def _shift_scan(values: np.ndarray, grid: PeriodicGrid, alpha: float, max_shifts: int | None, second: bool):
    best, arg = 0.0, (0, 0)
    h = grid.spacing
    for s in subsample_shifts(grid.n_points, max_shifts):
        forward = np.roll(values, -s)
        if second:
            diff = np.abs(forward + np.roll(values, s) - 2.0 * values)
        else:
            diff = np.abs(forward - values)
        j = int(np.argmax(diff))
        q = float(diff[j]) / (s * h) ** alpha
        if q > best:
            best, arg = q, (j, (j + s) % grid.n_points)
    return best, arg


def holder_seminorm(f: GridFunction, alpha: float, max_shifts: int | None = None) -> float:
    """sup |f(x) - f(y)| / d(x, y)^α over node pairs with 0 < d <= P/2.

    ``max_shifts`` thins the index shifts to a geometric subset (a lower
    bound, used on very fine grids).
    """
    return _shift_scan(_samples(f), f.grid, alpha, max_shifts, second=False)[0]


def holder_seminorm_pair(f: GridFunction, alpha: float, max_shifts: int | None = None):
    return _shift_scan(_samples(f), f.grid, alpha, max_shifts, second=False)


def second_difference_constant(f: GridFunction, alpha: float, max_shifts: int | None = None) -> float:
    """sup |f(x+y) + f(x-y) - 2 f(x)| / |y|^α over nodes x and shifts 0 < |y| <= P/2."""
    return _shift_scan(_samples(f), f.grid, alpha, max_shifts, second=True)[0]


def rho_growth_seminorm(f: GridFunction, alpha: float, rho: CriticalRadiusField) -> float:
    """max_j ρ(x_j)^{-α} |f_j|."""
    return float(np.max(np.abs(_samples(f)) * np.asarray(rho.values) ** (-alpha)))


def holder_norm(f: GridFunction, alpha: float, rho: CriticalRadiusField, max_shifts: int | None = None) -> HolderReport:
    semi, pair = holder_seminorm_pair(f, alpha, max_shifts)
    weighted = np.abs(_samples(f)) * np.asarray(rho.values) ** (-alpha)
    return HolderReport(semi, float(weighted.max()), alpha, pair, int(np.argmax(weighted)))


# ---------------------------------------------------------------------------
# ball averages and BMO


def ball_weights(grid: PeriodicGrid, center_index: int, radius: float) -> np.ndarray:
    return grid.cell_overlaps(grid.coordinates[center_index], radius)


def ball_mean(f: GridFunction, center_index: int, radius: float) -> complex:
    """(1/|B|) ∫_B f with |B| = 2r."""
    w = ball_weights(f.grid, center_index, radius)
    if not np.any(w > 0):
        raise ValueError("empty ball")
    return complex(np.dot(w, _samples(f)) / (2.0 * radius))


def _window_matrix(grid: PeriodicGrid, radius: float, centers: np.ndarray) -> np.ndarray:
    """Rows are ball weights for the given centers (circulant in the center)."""
    base = ball_weights(grid, 0, radius)
    n = grid.n_points
    return base[(np.arange(n)[None, :] - centers[:, None]) % n]


def _by_radius(balls: BallFamily):
    groups = defaultdict(list)
    for pos, (c, r) in enumerate(balls):
        groups[r].append((pos, c))
    return groups


def bmo_alpha_norm(f: GridFunction, alpha: float, balls: BallFamily, rho: CriticalRadiusField) -> float:
    """max over the family of the oscillation / |B|^α, and of the mean size / |B|^α
    on balls with r >= ρ(center)."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    vals = _samples(f)
    grid = balls.grid
    rho_v = np.asarray(rho.values)
    worst = 0.0
    for r, members in _by_radius(balls).items():
        centers = np.array([c for _, c in members])
        w = _window_matrix(grid, r, centers)
        size = 2.0 * r
        means = (w @ vals) / size
        osc = np.sum(w * np.abs(vals[None, :] - means[:, None]), axis=1) / size
        worst = max(worst, float(osc.max()) / size**alpha)
        large = r >= rho_v[centers]
        if np.any(large):
            mass = (w[large] @ np.abs(vals)) / size
            worst = max(worst, float(mass.max()) / size**alpha)
    return worst


def ball_means(f: GridFunction, balls: BallFamily) -> np.ndarray:
    """f_B for every ball in family order."""
    out = np.zeros(len(balls), dtype=complex)
    vals = _samples(f)
    for r, members in _by_radius(balls).items():
        pos = np.array([p for p, _ in members])
        centers = np.array([c for _, c in members])
        out[pos] = (_window_matrix(balls.grid, r, centers) @ vals) / (2.0 * r)
    return out


# ---------------------------------------------------------------------------
# harmonic-extension functionals


def poisson_derivative_field(
    spec: SpectralDecomposition, order: FractionalOrder, f, tgrid: TimeGrid
) -> SpacetimeField:
    """F(x, t) = t^β ∂_t^β P_t f(x) on every time node."""
    t = tgrid.points
    coeffs = spec.coefficients(_samples(f))
    mult = np.stack([ti**order.beta * frac_deriv_multiplier(spec.eigenvalues, order, ti) for ti in t], axis=1)
    values = spec.synthesize(mult * coeffs[:, None])
    if order.is_integer and not np.iscomplexobj(_samples(f)):
        values = np.real(values)
    return SpacetimeField(np.asarray(values), spec.grid, tgrid, order.beta)


def sup_growth_constant(field: SpacetimeField, alpha: float) -> float:
    """max_t t^{-α} max_x |F(x, t)|, the empirical growth constant."""
    per_time = np.max(np.abs(field.values), axis=0)
    return float(np.max(per_time * field.tgrid.points ** (-alpha)))


def growth_profile(field: SpacetimeField) -> np.ndarray:
    """max_x |F(x, t)| per time node."""
    return np.max(np.abs(field.values), axis=0)


def streamed_growth_profile(spec: SpectralDecomposition, order: FractionalOrder, f, tgrid: TimeGrid) -> np.ndarray:
    """Same as ``growth_profile(poisson_derivative_field(...))`` one time at a time.

    Meant for very fine grids where the full space-time field would not fit
    in memory.
    """
    coeffs = spec.coefficients(_samples(f))
    out = np.empty(tgrid.count)
    for i, t in enumerate(tgrid.points):
        mult = t**order.beta * frac_deriv_multiplier(spec.eigenvalues, order, t)
        out[i] = np.max(np.abs(spec.synthesize(mult * coeffs)))
    return out


def carleson_functional(field: SpacetimeField, alpha: float, balls: BallFamily) -> CarlesonReport:
    """Per ball ((1/|B|) ∫_{B̂} |F|² dx dt/t)^{1/2} / |B|^α over the tent t <= r."""
    t = field.tgrid.points
    w_t = field.tgrid.weights
    energy = np.abs(field.values) ** 2
    out = np.full(len(balls), np.nan)
    empty = 0
    for r, members in _by_radius(balls).items():
        inside = t <= r * (1 + 1e-12)
        pos = np.array([p for p, _ in members])
        if not np.any(inside):
            empty += len(members)
            continue
        column = energy[:, inside] @ w_t[inside]
        centers = np.array([c for _, c in members])
        size = 2.0 * r
        mass = _window_matrix(balls.grid, r, centers) @ column
        out[pos] = np.sqrt(mass / size) / size**alpha
    return CarlesonReport(out, tuple(balls), alpha, field.order, empty)


def tent_growth_bound(tgrid: TimeGrid, alpha: float, radius: float) -> float:
    """Per-ball factor C with Carleson value <= C * sup_growth_constant."""
    t = tgrid.points
    inside = t <= radius * (1 + 1e-12)
    return math.sqrt(float(np.sum((t[inside] / radius) ** (2 * alpha) * tgrid.weights[inside]))) * 2.0 ** (-alpha)


def square_function_gbeta(
    spec: SpectralDecomposition, beta: float, f, tgrid: TimeGrid, tails: bool = True
) -> GridFunction:
    """g_β f(x) = (∫_0^∞ |t^β ∂_t^β P_t f(x)|² dt/t)^{1/2}.

    The grid sum covers [t_min, t_max]; with ``tails`` the two outside pieces
    are added in closed form from the eigen-expansion.
    """
    field = poisson_derivative_field(spec, FractionalOrder(beta), f, tgrid)
    sq = np.abs(field.values) ** 2 @ tgrid.weights
    if tails:
        sq = sq + _tail_energy(spec, beta, f, tgrid)
    return GridFunction(np.sqrt(np.maximum(sq, 0.0)), spec.grid)


def _tail_energy(spec: SpectralDecomposition, beta: float, f, tgrid: TimeGrid) -> np.ndarray:
    root = np.sqrt(np.maximum(spec.eigenvalues, 0.0))
    coeffs = spec.coefficients(_samples(f))
    live = np.abs(coeffs) > 0
    root, coeffs = root[live], coeffs[live]
    weights = log_time_tails(root[:, None] + root[None, :], root[:, None] * root[None, :], beta, tgrid)
    amp = spec.eigenvectors[:, live] * coeffs[None, :]
    return np.real(np.einsum("xk,kl,xl->x", np.conj(amp), weights, amp))


def area_function_sbeta(spec: SpectralDecomposition, beta: float, f, tgrid: TimeGrid) -> GridFunction:
    """S_β f(z) = (∫∫_{|z-y|<t} |t^β ∂_t^β P_t f(y)|² dy dt/t²)^{1/2} (aperture 1)."""
    field = poisson_derivative_field(spec, FractionalOrder(beta), f, tgrid)
    grid = spec.grid
    h = grid.spacing
    energy = np.abs(field.values) ** 2
    dist = grid.periodic_distance(grid.coordinates, grid.coordinates[0])
    total = np.zeros(grid.n_points)
    for i, (t, w) in enumerate(zip(tgrid.points, tgrid.weights)):
        window = (dist < t).astype(float)
        # circular convolution: Σ_y window(z - y) |F(y, t)|²
        conv = np.real(np.fft.ifft(np.fft.fft(window) * np.fft.fft(energy[:, i])))
        total += conv * h * w / t
    return GridFunction(np.sqrt(np.maximum(total, 0.0)), grid)
