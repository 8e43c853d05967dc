"""Periodic grid, nonnegative potential, and the discrete Schrödinger matrix.

All integrals over balls treat grid samples as cell averages: sample ``j`` is
constant on ``[x_j - h/2, x_j + h/2)`` and a ball ``B(x, r)`` integrates that
piecewise-constant interpolant exactly (partial cells included).  This keeps
``r -> integral`` continuous, which the critical-radius bisection relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

RHO_RELATIVE_TOLERANCE = 1e-10


class RhoInfiniteError(ValueError):
    """The potential vanishes identically so the critical radius is unbounded."""


@dataclass(frozen=True)
class PeriodicGrid:
    n_points: int
    period: float

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError(f"n_points must be >= 16, got {self.n_points}")
        if self.n_points % 2:
            raise ValueError("n_points must be even")
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def spacing(self) -> float:
        return self.period / self.n_points

    @property
    def coordinates(self) -> np.ndarray:
        return -0.5 * self.period + self.spacing * np.arange(self.n_points)

    @property
    def origin_index(self) -> int:
        """Index of the node sitting exactly at x = 0."""
        return self.n_points // 2

    def periodic_distance(self, x, y):
        d = np.abs(np.asarray(x) - np.asarray(y)) % self.period
        return np.minimum(d, self.period - d)

    def refined(self, factor: int = 2) -> "PeriodicGrid":
        return PeriodicGrid(self.n_points * factor, self.period)

    def cell_overlaps(self, center: float, radius: float) -> np.ndarray:
        """Length of ``[center - radius, center + radius]`` inside each cell.

        The interval is taken on the torus; ``radius`` must not exceed P/2.
        """
        if radius > 0.5 * self.period * (1 + 1e-12):
            raise ValueError("ball radius exceeds half the period")
        h = self.spacing
        left_edge = self.coordinates[0] - 0.5 * h
        a = left_edge + (center - radius - left_edge) % self.period
        b = a + 2.0 * radius
        lo = left_edge + h * np.arange(self.n_points)
        out = np.clip(np.minimum(b, lo + h) - np.maximum(a, lo), 0.0, None)
        shifted = lo + self.period
        out += np.clip(np.minimum(b, shifted + h) - np.maximum(a, shifted), 0.0, None)
        return out


@dataclass(frozen=True)
class Potential:
    samples: np.ndarray
    label: str = ""

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("potential samples must be one-dimensional")
        if not np.all(np.isfinite(s)):
            raise ValueError("potential samples must be finite")
        if np.any(s < 0):
            raise ValueError("potential must be nonnegative")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.samples == self.samples[0]))

    @property
    def vanishes(self) -> bool:
        return not np.any(self.samples > 0)


def constant_potential(grid: PeriodicGrid, mu: float) -> Potential:
    return Potential(np.full(grid.n_points, float(mu)), label=f"constant:{mu:g}")


def quadratic_potential(grid: PeriodicGrid) -> Potential:
    """V(x) = x^2 on the fundamental cell, repeated periodically."""
    return Potential(grid.coordinates**2, label="quadratic")


def well_potential(grid: PeriodicGrid, depth: float, width: float) -> Potential:
    """Constant ``depth`` outside ``|x| < width / 2`` and zero inside."""
    x = grid.coordinates
    return Potential(np.where(np.abs(x) < 0.5 * width, 0.0, depth), label=f"well:{depth:g},{width:g}")


def load_potential(path: str | Path, grid: PeriodicGrid) -> Potential:
    """Read a two-column (coordinate, value) text file and interpolate onto ``grid``."""
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
    xs, vs = data[:, 0], data[:, 1]
    order = np.argsort(xs)
    values = np.interp(grid.coordinates, xs[order], vs[order], period=grid.period)
    return Potential(values, label=f"file:{Path(path).name}")


def parse_potential(spec: str, grid: PeriodicGrid) -> Potential:
    """Build a potential from ``constant:MU``, ``quadratic``, ``well:DEPTH,WIDTH``
    or ``file:PATH``."""
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "constant":
        return constant_potential(grid, float(args))
    if name == "quadratic":
        return quadratic_potential(grid)
    if name == "well":
        depth, width = (float(a) for a in args.split(","))
        return well_potential(grid, depth, width)
    if name == "file":
        return load_potential(args, grid)
    raise ValueError(f"unknown potential spec {spec!r}")


@dataclass(frozen=True)
class SchrodingerOperator:
    matrix: np.ndarray
    grid: PeriodicGrid
    potential: Potential = field(repr=False)


def build_operator(grid: PeriodicGrid, v: Potential) -> SchrodingerOperator:
    """Assemble L = -Δ + V with the periodic three-point Laplacian."""
    n = grid.n_points
    if v.samples.shape != (n,):
        raise ValueError(f"potential has {v.samples.size} samples, grid has {n} points")
    inv_h2 = 1.0 / grid.spacing**2
    m = np.zeros((n, n))
    idx = np.arange(n)
    m[idx, idx] = 2.0 * inv_h2 + v.samples
    m[idx, (idx + 1) % n] = -inv_h2
    m[idx, (idx - 1) % n] = -inv_h2
    m.setflags(write=False)
    return SchrodingerOperator(m, grid, v)


# ---------------------------------------------------------------------------
# ball integrals


class _CellIntegrator:
    """Antiderivative of a piecewise-constant periodic function, extended to ℝ."""

    def __init__(self, grid: PeriodicGrid, values: np.ndarray):
        h = grid.spacing
        self.period = grid.period
        self.left = grid.coordinates[0] - 0.5 * h
        self.knots = self.left + h * np.arange(grid.n_points + 1)
        self.cumulative = np.concatenate([[0.0], np.cumsum(values) * h])
        self.total = self.cumulative[-1]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        wraps = np.floor((s - self.left) / self.period)
        local = s - wraps * self.period
        return wraps * self.total + np.interp(local, self.knots, self.cumulative)

    def over_ball(self, centers, radius):
        centers = np.asarray(centers, dtype=float)
        return self(centers + radius) - self(centers - radius)


def ball_integral(grid: PeriodicGrid, values: np.ndarray, center_index: int, radius: float) -> float:
    return float(_CellIntegrator(grid, values).over_ball(grid.coordinates[center_index], radius))


@dataclass(frozen=True)
class BallFamily:
    """Balls ``B(x_c, r)`` given as ``(center_index, radius)`` pairs."""

    grid: PeriodicGrid
    balls: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.balls:
            raise ValueError("ball family is empty")
        cap = 0.25 * self.grid.period * (1 + 1e-12)
        for c, r in self.balls:
            if not 0 <= c < self.grid.n_points:
                raise ValueError(f"center index {c} outside grid")
            if not 0 < r <= cap:
                raise ValueError(f"radius {r} outside (0, P/4]")

    def __iter__(self):
        return iter(self.balls)

    def __len__(self):
        return len(self.balls)

    @property
    def radii(self) -> np.ndarray:
        return np.unique([r for _, r in self.balls])

    @classmethod
    def dyadic(
        cls,
        grid: PeriodicGrid,
        centers: Iterable[int] | None = None,
        min_radius: float | None = None,
    ) -> "BallFamily":
        """All centers (default: every node) times radii ``h 2^j <= P/4``."""
        if centers is None:
            centers = range(grid.n_points)
        radii = dyadic_radii(grid, min_radius)
        return cls(grid, tuple((int(c), float(r)) for r in radii for c in centers))


def dyadic_radii(grid: PeriodicGrid, min_radius: float | None = None) -> list[float]:
    h = grid.spacing
    start = h if min_radius is None else min_radius
    out = []
    r = start
    while r <= 0.25 * grid.period * (1 + 1e-12):
        out.append(r)
        r *= 2.0
    return out


def reverse_holder_constant(v: Potential, q: float, balls: BallFamily) -> float:
    """sup over balls of (avg V^q)^(1/q) / avg V; +inf when only the denominator vanishes."""
    if not q > 1:
        raise ValueError("q must exceed 1")
    grid = balls.grid
    plain = _CellIntegrator(grid, v.samples)
    power = _CellIntegrator(grid, v.samples**q)
    x = grid.coordinates
    worst = 0.0
    for c, r in balls:
        if not np.any(grid.periodic_distance(x, x[c]) <= r):
            raise ValueError(f"ball ({c}, {r}) contains no grid point")
        size = 2.0 * r
        mean = plain.over_ball(x[c], r) / size
        mean_q = power.over_ball(x[c], r) / size
        if mean <= 0.0:
            ratio = 1.0 if mean_q <= 0.0 else math.inf
        else:
            ratio = max(mean_q, 0.0) ** (1.0 / q) / mean
        worst = max(worst, ratio)
    return worst


# ---------------------------------------------------------------------------
# critical radius


@dataclass(frozen=True)
class CriticalRadiusField:
    values: np.ndarray
    grid: PeriodicGrid
    dimension_parameter: int = 1

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))


def _critical_radii(grid: PeriodicGrid, v: Potential, centers: np.ndarray, n_dim: int) -> np.ndarray:
    if n_dim != 1:
        raise NotImplementedError("only n_dim = 1 is supported")
    if v.vanishes:
        raise RhoInfiniteError("V vanishes identically; rho is unbounded")
    integ = _CellIntegrator(grid, v.samples)
    cap = 0.5 * grid.period

    def level(r):
        return r ** (2 - n_dim) * integ.over_ball(centers, r)

    lo = np.zeros_like(centers)
    hi = np.full_like(centers, cap)
    capped = level(hi) <= 1.0
    # the map is continuous and nondecreasing in r, so bisection finds the last r with level <= 1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        ok = level(mid) <= 1.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
        if np.all(hi - lo <= RHO_RELATIVE_TOLERANCE * hi):
            break
    return np.where(capped, cap, lo)


def critical_radius(grid: PeriodicGrid, v: Potential, center_index: int, n_dim: int = 1) -> float:
    """sup{r in (0, P/2] : r^(2-n) ∫_B(x_j, r) V <= 1}."""
    center = np.array([grid.coordinates[center_index]])
    return float(_critical_radii(grid, v, center, n_dim)[0])


def critical_radius_field(grid: PeriodicGrid, v: Potential, n_dim: int = 1) -> CriticalRadiusField:
    values = _critical_radii(grid, v, grid.coordinates.copy(), n_dim)
    values.setflags(write=False)
    return CriticalRadiusField(values, grid, n_dim)


def check_rho_comparability(field: CriticalRadiusField, k0: float = 1.0) -> float:
    """Smallest c >= 1 such that, for every ordered pair of nodes,

    c^-1 ρ(x) (1 + d/ρ(x))^(-k0) <= ρ(y) <= c ρ(x) (1 + d/ρ(x))^(k0/(k0+1)).
    """
    if k0 < 1:
        raise ValueError("k0 must be >= 1")
    rho = np.asarray(field.values)
    x = field.grid.coordinates
    c = 1.0
    for i in range(rho.size):
        d = field.grid.periodic_distance(x, x[i])
        growth = 1.0 + d / rho[i]
        lower = rho[i] * growth ** (-k0) / rho
        upper = rho / (rho[i] * growth ** (k0 / (k0 + 1.0)))
        c = max(c, float(lower.max()), float(upper.max()))
    return c


def subsample_shifts(n_points: int, max_count: int | None = None) -> np.ndarray:
    """Index shifts 1..N/2, optionally thinned to a geometric subset."""
    half = n_points // 2
    if max_count is None or half <= max_count:
        return np.arange(1, half + 1)
    geo = np.unique(np.round(np.geomspace(1, half, max_count)).astype(int))
    return geo


def as_samples(values: Sequence[float] | np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape != (grid.n_points,):
        raise ValueError(f"expected {grid.n_points} samples, got shape {arr.shape}")
    return arr
