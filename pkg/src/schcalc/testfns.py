"""Explicit inputs: Weierstrass truncations, the log bump, Hölder cusps, modes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import GridFunction, SpectralDecomposition
from .lattice import PeriodicGrid

KINDS = ("weierstrass", "log_bump", "holder_cusp", "eigen_mode", "random_smooth", "constant")


class UnresolvableError(ValueError):
    pass


def weierstrass(grid: PeriodicGrid, K: int) -> GridFunction:
    """Σ_{k=1}^K 2^{-k} e^{2πi 2^k x}."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if not float(grid.period).is_integer():
        raise ValueError("the Weierstrass series is 1-periodic; the grid period must be an integer")
    # 2^K cycles per unit length, P units per period
    if 2**K * grid.period > grid.n_points / 4:
        raise UnresolvableError(f"2^{K} oscillations per unit need at least {4 * 2**K * int(grid.period)} points")
    x = grid.coordinates
    k = np.arange(1, K + 1)
    samples = (2.0**-k * np.exp(2j * np.pi * np.outer(x, 2.0**k))).sum(axis=1)
    return GridFunction(samples, grid)


def log_bump(grid: PeriodicGrid) -> GridFunction:
    """max{log(1/|x|), 0}; the node at x = 0 takes the value log(2/h)."""
    if grid.period < 4:
        raise ValueError("log_bump needs a period of at least 4")
    x = np.abs(grid.coordinates)
    with np.errstate(divide="ignore"):
        values = np.maximum(-np.log(x), 0.0)
    values[x == 0] = math.log(2.0 / grid.spacing)
    return GridFunction(values, grid)


def holder_cusp(grid: PeriodicGrid, alpha: float) -> GridFunction:
    """dist(x, 0)^α on the torus."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    return GridFunction(grid.periodic_distance(grid.coordinates, 0.0) ** alpha, grid)


def constant_function(grid: PeriodicGrid, value: float = 1.0) -> GridFunction:
    return GridFunction(np.full(grid.n_points, float(value)), grid)


def eigen_mode(spec: SpectralDecomposition, k: int) -> GridFunction:
    return GridFunction(spec.eigenvector(k), spec.grid)


def random_smooth(grid: PeriodicGrid, seed: int = 0, cutoff: int = 8) -> GridFunction:
    """Real trigonometric polynomial with frequencies |k| <= cutoff and unit L² norm.

    The coefficients depend only on ``seed`` and ``cutoff``, so refining the
    grid samples the same function.
    """
    if not 0 < 2 * cutoff < grid.n_points:
        raise ValueError("cutoff must be below the Nyquist index")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(cutoff + 1)
    b = rng.standard_normal(cutoff + 1)
    b[0] = 0.0
    k = np.arange(cutoff + 1)
    phase = 2 * np.pi * np.outer(grid.coordinates, k) / grid.period
    values = np.cos(phase) @ a + np.sin(phase) @ b
    # continuum L² norm of the polynomial (exact on any grid finer than 2*cutoff)
    norm = math.sqrt(grid.period * (a[0] ** 2 + 0.5 * np.sum(a[1:] ** 2 + b[1:] ** 2)))
    return GridFunction(values / norm, grid)


@dataclass(frozen=True)
class TestFunctionSpec:
    """Named recipe such as ``weierstrass:K=8`` or ``holder_cusp:alpha=0.5``."""

    __test__ = False  # keep pytest from collecting this

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "TestFunctionSpec":
        kind, _, rest = text.partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, _, value = item.partition("=")
            params[key.strip()] = float(value) if "." in value or "e" in value.lower() else int(value)
        return cls(kind.strip(), params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))

    def build(self, grid: PeriodicGrid, spec: SpectralDecomposition | None = None) -> GridFunction:
        p = self.params
        if self.kind == "weierstrass":
            return weierstrass(grid, int(p.get("K", 8)))
        if self.kind == "log_bump":
            return log_bump(grid)
        if self.kind == "holder_cusp":
            return holder_cusp(grid, float(p.get("alpha", 0.5)))
        if self.kind == "random_smooth":
            return random_smooth(grid, int(p.get("seed", 0)), int(p.get("cutoff", 8)))
        if self.kind == "constant":
            return constant_function(grid, float(p.get("value", 1.0)))
        if spec is None:
            raise ValueError("eigen_mode needs a spectral decomposition")
        return eigen_mode(spec, int(p.get("k", 0)))
