"""Spectral functional calculus of the discrete Schrödinger operator.

The eigensystem of ``L`` is the source of truth: every operator below is a
multiplier ``phi(λ_k)`` acting on the coefficients ``<f, e_k>``.  The
integral representations (Bochner subordination, the Segovia–Wheeden
fractional derivative, the Gamma-integral formulas for ``L^{±σ/2}`` and
Laplace-type multipliers) are evaluated by quadrature in the time variable.
Because ``P_s``, ``T_s`` and ``∂_s P_s`` are all diagonal in the eigenbasis, a
quadrature rule ``Σ_i w_i P_{s_i} f`` is evaluated as
``Σ_k (Σ_i w_i e^{-s_i √λ_k}) <f, e_k> e_k``, which is the same finite sum
in a cheaper order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import linalg, special

from .lattice import PeriodicGrid, Potential, SchrodingerOperator, build_operator

ScalarMap = Callable[[np.ndarray], np.ndarray]


class OracleMismatchError(RuntimeError):
    """A quadrature route disagrees with the spectral closed form."""


class EigensolverError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# data containers


@dataclass(frozen=True)
class GridFunction:
    samples: np.ndarray
    grid: PeriodicGrid

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {s.shape}")
        if not np.iscomplexobj(s):
            s = s.astype(float)
        object.__setattr__(self, "samples", s)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.spacing * np.sum(np.abs(self.samples) ** 2)))

    def l1_norm(self) -> float:
        return float(self.grid.spacing * np.sum(np.abs(self.samples)))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.samples + other.samples, self.grid)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.samples - other.samples, self.grid)

    def __mul__(self, scalar) -> "GridFunction":
        return GridFunction(self.samples * scalar, self.grid)

    __rmul__ = __mul__

    def real_if_close(self, tol: float = 1e-12) -> "GridFunction":
        s = self.samples
        if np.iscomplexobj(s) and np.max(np.abs(s.imag), initial=0.0) <= tol * max(1.0, np.max(np.abs(s))):
            return GridFunction(s.real.copy(), self.grid)
        return self


@dataclass(frozen=True)
class TimeGrid:
    """Log-uniform times ``t_min = t_0 < ... < t_{M-1} = t_max``."""

    t_min: float
    t_max: float
    count: int = 64

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if self.count < 2:
            raise ValueError("need at least two time points")

    @property
    def points(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, self.count)

    @property
    def log_step(self) -> float:
        return math.log(self.t_max / self.t_min) / (self.count - 1)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for ∫ g(t) dt/t in the variable log t."""
        w = np.full(self.count, self.log_step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def default_time_grid(grid: PeriodicGrid, count: int = 64) -> TimeGrid:
    scale = grid.period / (2 * math.pi)
    return TimeGrid(1e-3 * scale, 1e1 * scale, count)


@dataclass(frozen=True)
class SpacetimeField:
    """Samples ``F(x_j, t_i)`` stored with shape ``(n_points, n_times)``."""

    values: np.ndarray
    grid: PeriodicGrid
    tgrid: TimeGrid
    order: float = 0.0

    def __post_init__(self):
        if self.values.shape != (self.grid.n_points, self.tgrid.count):
            raise ValueError("field shape does not match grids")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field has non-finite entries")


@dataclass(frozen=True)
class FractionalOrder:
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("order must be positive")

    @property
    def m(self) -> int:
        return math.floor(self.beta) + 1

    @property
    def is_integer(self) -> bool:
        return float(self.beta).is_integer()

    @property
    def phase(self) -> complex:
        # exact for integer orders so that ∂_t^1 is a real derivative
        if self.is_integer:
            return complex((-1) ** int(self.beta))
        return complex(np.exp(1j * math.pi * self.beta))


# ---------------------------------------------------------------------------
# spectral decompositions


class SpectralDecomposition:
    """Eigensystem of a dense symmetric matrix.

    Eigenvectors are orthonormal for ``<f, g> = h Σ f_j conj(g_j)``.
    """

    def __init__(self, eigenvalues: np.ndarray, eigenvectors, grid: PeriodicGrid, operator=None):
        self.eigenvalues = eigenvalues
        self._vectors = eigenvectors
        self.grid = grid
        self.operator = operator

    @property
    def eigenvectors(self) -> np.ndarray:
        """Columns are e_k sampled on the grid."""
        return self._vectors

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        return self.grid.spacing * (self.eigenvectors.T @ f)

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """``coeffs`` may be ``(K,)`` or ``(K, M)``; columns map to columns."""
        return self.eigenvectors @ coeffs

    def eigenvector(self, k: int) -> np.ndarray:
        if not 0 <= k < self.size:
            raise IndexError(f"mode {k} out of range")
        return self.eigenvectors[:, k].copy()

    def kernel(self, multiplier: np.ndarray, rows: Sequence[int] | None = None) -> np.ndarray:
        e = self.eigenvectors
        left = e if rows is None else e[np.asarray(rows)]
        return (left * multiplier) @ e.T


class FourierDecomposition(SpectralDecomposition):
    """Eigensystem of ``-Δ_h + μ`` by the discrete Fourier transform.

    Mode ``k`` is ``e_k(x) = e^{2πikx/P}/√P`` with eigenvalue
    ``(4/h²) sin²(πk/N) + μ``.  Eigenvalues are exposed in ascending order;
    ``coefficients``/``synthesize`` use that same order.
    """

    def __init__(self, grid: PeriodicGrid, mu: float = 0.0):
        n = grid.n_points
        k = np.arange(n)
        lam = 4.0 / grid.spacing**2 * np.sin(np.pi * k / n) ** 2 + mu
        order = np.argsort(lam, kind="stable")
        super().__init__(lam[order], None, grid)
        self.mu = float(mu)
        self._order = order
        self._inverse = np.argsort(order)
        # e^{-2πik x_0/P} with x_0 = -P/2
        self._sign = np.where(k % 2, -1.0, 1.0)

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        c = np.fft.fft(f, axis=0) * (self.grid.spacing / math.sqrt(self.grid.period))
        c = (c.T * self._sign).T
        return c[self._order]

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        c = np.asarray(coeffs)[self._inverse]
        c = (c.T * self._sign).T
        return np.fft.ifft(c, axis=0) * (self.grid.n_points / math.sqrt(self.grid.period))

    def eigenvector(self, k: int) -> np.ndarray:
        if not 0 <= k < self.size:
            raise IndexError(f"mode {k} out of range")
        freq = self._order[k]
        return np.exp(2j * np.pi * freq * self.grid.coordinates / self.grid.period) / math.sqrt(self.grid.period)

    @property
    def eigenvectors(self) -> np.ndarray:
        if self.grid.n_points > 4096:
            raise MemoryError("dense Fourier eigenvector matrix requested for a very large grid")
        phase = np.outer(self.grid.coordinates, self._order) / self.grid.period
        return np.exp(2j * np.pi * phase) / math.sqrt(self.grid.period)

    def kernel(self, multiplier: np.ndarray, rows: Sequence[int] | None = None) -> np.ndarray:
        n = self.grid.n_points
        first = np.zeros(n)
        first[0] = 1.0 / self.grid.spacing
        # column 0 of the kernel is the response to a unit-mass spike at node 0
        col = self.synthesize(multiplier * self.coefficients(first))
        col = col.real if np.max(np.abs(col.imag), initial=0.0) <= 1e-12 * np.max(np.abs(col)) else col
        idx = np.arange(n) if rows is None else np.asarray(rows)
        # circulant: K[i, j] = col[(i - j) mod n]
        return col[(idx[:, None] - np.arange(n)[None, :]) % n]


def eigendecompose(op: SchrodingerOperator, tol: float = 1e-8) -> SpectralDecomposition:
    """Dense symmetric eigensolve with residual and orthonormality checks."""
    h = op.grid.spacing
    try:
        lam, u = linalg.eigh(op.matrix)
    except linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(str(exc)) from exc
    vecs = u / math.sqrt(h)
    resid = np.max(np.linalg.norm(op.matrix @ u - u * lam, axis=0))
    if resid > tol * max(1.0, float(lam[-1])):
        raise EigensolverError(f"eigen-residual {resid:.3e} exceeds tolerance")
    gram = h * (vecs.T @ vecs)
    if np.max(np.abs(gram - np.eye(lam.size))) > 1e-10:
        raise EigensolverError("eigenvectors are not orthonormal")
    lam.setflags(write=False)
    vecs.setflags(write=False)
    return SpectralDecomposition(lam, vecs, op.grid, op)


def decompose(grid: PeriodicGrid, v: Potential, backend: str = "auto") -> SpectralDecomposition:
    """``backend``: ``dense``, ``fourier`` (constant V only) or ``auto``."""
    if backend == "auto":
        backend = "fourier" if v.is_constant and grid.n_points > 1024 else "dense"
    if backend == "fourier":
        if not v.is_constant:
            raise ValueError("the Fourier backend needs a constant potential")
        return FourierDecomposition(grid, float(v.samples[0]))
    if backend == "dense":
        return eigendecompose(build_operator(grid, v))
    raise ValueError(f"unknown backend {backend!r}")


def free_decomposition(grid: PeriodicGrid) -> FourierDecomposition:
    """Eigensystem of the free periodic Laplacian (V ≡ 0)."""
    return FourierDecomposition(grid, 0.0)


# ---------------------------------------------------------------------------
# functional calculus


def _samples(f) -> np.ndarray:
    return f.samples if isinstance(f, GridFunction) else np.asarray(f)


def _finish(spec: SpectralDecomposition, values: np.ndarray) -> GridFunction:
    return GridFunction(values, spec.grid).real_if_close()


def apply_multiplier(spec: SpectralDecomposition, multiplier: np.ndarray, f) -> GridFunction:
    multiplier = np.asarray(multiplier)
    if not np.all(np.isfinite(multiplier)):
        raise ValueError("multiplier is not finite on the spectrum")
    return _finish(spec, spec.synthesize(multiplier * spec.coefficients(_samples(f))))


def apply_function(spec: SpectralDecomposition, phi: ScalarMap, f) -> GridFunction:
    """Σ_k phi(λ_k) <f, e_k> e_k."""
    return apply_multiplier(spec, phi(spec.eigenvalues), f)


def heat_multiplier(lam: np.ndarray, t: float) -> np.ndarray:
    return np.exp(-t * lam)


def poisson_multiplier(lam: np.ndarray, t: float) -> np.ndarray:
    return np.exp(-t * np.sqrt(np.maximum(lam, 0.0)))


def frac_deriv_multiplier(lam: np.ndarray, order: FractionalOrder, t: float) -> np.ndarray:
    """∂_t^β e^{-t√λ} = e^{iπβ} λ^{β/2} e^{-t√λ}."""
    root = np.sqrt(np.maximum(lam, 0.0))
    return order.phase * root**order.beta * np.exp(-t * root)


def heat_apply(spec: SpectralDecomposition, t: float, f) -> GridFunction:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return apply_multiplier(spec, heat_multiplier(spec.eigenvalues, t), f)


def poisson_spectral(spec: SpectralDecomposition, t: float, f) -> GridFunction:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return apply_multiplier(spec, poisson_multiplier(spec.eigenvalues, t), f)


def classical_poisson_apply(grid: PeriodicGrid, t: float, f) -> GridFunction:
    """e^{-t(-Δ_h)^{1/2}} f on the periodic grid (V ≡ 0)."""
    return poisson_spectral(free_decomposition(grid), t, f)


def frac_deriv_poisson_spectral(spec: SpectralDecomposition, order: FractionalOrder, t: float, f) -> GridFunction:
    if not t > 0:
        raise ValueError("t must be positive")
    return apply_multiplier(spec, frac_deriv_multiplier(spec.eigenvalues, order, t), f)


def fractional_power(spec: SpectralDecomposition, exponent: float, f) -> GridFunction:
    """L^{exponent} f spectrally; λ_0 must be positive for negative exponents."""
    lam = spec.eigenvalues
    if exponent < 0 and lam[0] <= 0:
        raise ValueError("negative power of a singular operator")
    return apply_multiplier(spec, np.where(lam > 0, np.abs(lam) ** exponent, 0.0), f)


# kernels --------------------------------------------------------------------


def _real_kernel(k: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(k) and np.max(np.abs(k.imag), initial=0.0) <= 1e-12 * max(1.0, np.max(np.abs(k))):
        return k.real
    return k


def heat_kernel(spec: SpectralDecomposition, t: float, rows=None) -> np.ndarray:
    """k_t(x_i, x_j) such that heat_apply(f)(x_i) = h Σ_j k_t(x_i, x_j) f_j."""
    if not t > 0:
        raise ValueError("t must be positive")
    return _real_kernel(spec.kernel(heat_multiplier(spec.eigenvalues, t), rows))


def poisson_kernel(spec: SpectralDecomposition, t: float, rows=None) -> np.ndarray:
    if not t > 0:
        raise ValueError("t must be positive")
    return _real_kernel(spec.kernel(poisson_multiplier(spec.eigenvalues, t), rows))


def q_kernel(spec: SpectralDecomposition, t: float, rows=None) -> np.ndarray:
    """Q_t = t² ∂_s k_s at s = t², i.e. multiplier -t² λ e^{-t² λ}."""
    if not t > 0:
        raise ValueError("t must be positive")
    lam = spec.eigenvalues
    return _real_kernel(spec.kernel(-(t**2) * lam * np.exp(-(t**2) * lam), rows))


def poisson_derivative_kernel(spec: SpectralDecomposition, order: FractionalOrder, t: float, rows=None) -> np.ndarray:
    """Kernel of t^β ∂_t^β P_t."""
    mult = t**order.beta * frac_deriv_multiplier(spec.eigenvalues, order, t)
    return _real_kernel(spec.kernel(mult, rows))


# ---------------------------------------------------------------------------
# quadrature routes


def _log_nodes(lo: float, hi: float, n: int) -> tuple[np.ndarray, float]:
    y = np.linspace(math.log(lo), math.log(hi), n)
    return np.exp(y), y[1] - y[0]


def _log_trapezoid(integrand: Callable[[np.ndarray, np.ndarray], np.ndarray], lam, lo, hi, n, chunk=2048):
    """∫_lo^hi integrand(s, λ) ds per λ, trapezoid in log s with an
    Euler–Maclaurin endpoint correction.

    ``integrand`` receives ``s`` shaped ``(1, n)`` and ``λ`` shaped ``(K, 1)``.
    """
    if n < 8:
        raise ValueError("need at least 8 quadrature points")
    s, dy = _log_nodes(lo, hi, n)
    lam = np.asarray(lam)
    out = []
    for start in range(0, lam.size, chunk):
        block = lam[start : start + chunk, None]
        g = integrand(s[None, :], block) * s[None, :]
        total = dy * (g.sum(axis=1) - 0.5 * (g[:, 0] + g[:, -1]))
        d_left = (-3 * g[:, 0] + 4 * g[:, 1] - g[:, 2]) / (2 * dy)
        d_right = (3 * g[:, -1] - 4 * g[:, -2] + g[:, -3]) / (2 * dy)
        out.append(total + dy**2 / 12.0 * (d_left - d_right))
    return np.concatenate(out) if out else np.zeros(0)


def _power_exp_head(c: float, a: np.ndarray, r0: float, start: int = 0, terms: int = 12) -> np.ndarray:
    """Σ_{n>=start} (-a)^n r0^{n+c} / (n! (n+c)), i.e. ∫_0^r0 r^{c-1}(e^{-ar} - [n<start terms]) dr."""
    a = np.asarray(a, dtype=float)
    total = np.zeros_like(a)
    term_scale = np.ones_like(a)
    for n in range(terms + start):
        if n >= start:
            total = total + term_scale * r0 ** (n + c) / (n + c)
        term_scale = term_scale * (-a) / (n + 1)
    return total


def _validate(name: str, approx: GridFunction, exact: GridFunction, f, tol: float):
    scale = max(np.max(np.abs(_samples(f))), 1e-300)
    err = float(np.max(np.abs(approx.samples - exact.samples)))
    if err > tol * scale:
        raise OracleMismatchError(f"{name}: deviation {err:.3e} exceeds {tol:.1e} x ||f||_inf")


def subordination_multiplier(lam: np.ndarray, t: float, quad_points: int = 256) -> np.ndarray:
    """(1/√π) ∫_0^∞ e^{-u} u^{-1/2} e^{-t²λ/(4u)} du by quadrature."""
    lam = np.maximum(np.asarray(lam, dtype=float), 0.0)

    def integrand(u, l):
        return np.exp(-u - t * t * l / (4.0 * u)) / np.sqrt(u)

    # the discarded head is at most 2√u_lo
    return _log_trapezoid(integrand, lam, 1e-26, 60.0, quad_points) / math.sqrt(math.pi)


def poisson_subordination(
    spec: SpectralDecomposition, t: float, f, quad_points: int = 256, validate: bool = False, tol: float = 1e-6
) -> GridFunction:
    """P_t f through Bochner subordination of the heat semigroup."""
    if not t > 0:
        raise ValueError("t must be positive")
    out = apply_multiplier(spec, subordination_multiplier(spec.eigenvalues, t, quad_points), f)
    if validate:
        _validate("subordination", out, poisson_spectral(spec, t, f), f, tol)
    return out


def segovia_wheeden_multiplier(lam: np.ndarray, order: FractionalOrder, t: float, quad_points: int = 512) -> np.ndarray:
    """e^{-iπ(m-β)}/Γ(m-β) ∫_0^∞ ∂_t^m e^{-(t+r)√λ} r^{m-β} dr/r by quadrature."""
    if order.is_integer:
        raise ValueError("integer orders are plain derivatives; use the spectral route")
    m, beta = order.m, order.beta
    c = m - beta
    root = np.sqrt(np.maximum(np.asarray(lam, dtype=float), 0.0))
    live = root > 0
    out = np.zeros(root.shape, dtype=complex)
    if not np.any(live):
        return out
    a = root[live]
    r_lo = 1e-4 / a.max()
    r_hi = 50.0 / a.min()

    def integrand(r, aa):
        return r ** (c - 1.0) * np.exp(-r * aa)

    body = _log_trapezoid(integrand, a, r_lo, r_hi, quad_points) + _power_exp_head(c, a, r_lo)
    prefactor = np.exp(-1j * math.pi * c) / math.gamma(c)
    out[live] = prefactor * (-a) ** m * np.exp(-t * a) * body
    return out


def frac_deriv_quadrature(
    spec: SpectralDecomposition,
    order: FractionalOrder,
    t: float,
    f,
    quad_points: int = 512,
    validate: bool = False,
    tol: float = 1e-5,
) -> GridFunction:
    if not t > 0:
        raise ValueError("t must be positive")
    if order.is_integer:
        out = frac_deriv_poisson_spectral(spec, order, t, f)
    else:
        out = apply_multiplier(spec, segovia_wheeden_multiplier(spec.eigenvalues, order, t, quad_points), f)
    if validate:
        _validate("segovia-wheeden", out, frac_deriv_poisson_spectral(spec, order, t, f), f, tol)
    return out


def _require_positive_ground(spec: SpectralDecomposition, tol: float = 1e-12):
    if spec.eigenvalues[0] <= tol * max(1.0, spec.eigenvalues[-1]):
        raise ValueError("λ_0 is not positive; the s -> ∞ tail diverges")


def negative_power_multiplier(lam: np.ndarray, sigma: float, quad_points: int = 512) -> np.ndarray:
    """1/Γ(σ) ∫_0^∞ e^{-s√λ} s^{σ-1} ds by quadrature (λ > 0)."""
    a = np.sqrt(np.asarray(lam, dtype=float))
    s_lo = 1e-4 / a.max()
    s_hi = 50.0 / a.min()

    def integrand(s, aa):
        return s ** (sigma - 1.0) * np.exp(-s * aa)

    body = _log_trapezoid(integrand, a, s_lo, s_hi, quad_points) + _power_exp_head(sigma, a, s_lo)
    return body / math.gamma(sigma)


def frac_power_neg(
    spec: SpectralDecomposition, sigma: float, f, quad_points: int = 512, validate: bool = False, tol: float = 1e-6
) -> GridFunction:
    """L^{-σ/2} f = 1/Γ(σ) ∫_0^∞ P_s f ds/s^{1-σ}, 0 < σ < 2."""
    if not 0 < sigma < 2:
        raise ValueError("sigma must lie in (0, 2)")
    _require_positive_ground(spec)
    out = apply_multiplier(spec, negative_power_multiplier(spec.eigenvalues, sigma, quad_points), f)
    if validate:
        _validate("negative power", out, fractional_power(spec, -sigma / 2, f), f, tol)
    return out


def positive_power_multiplier(lam: np.ndarray, sigma: float, quad_points: int = 512) -> np.ndarray:
    """1/Γ(-σ) ∫_0^∞ (e^{-s√λ} - 1) s^{-1-σ} ds by quadrature (λ > 0)."""
    a = np.sqrt(np.asarray(lam, dtype=float))
    s_lo = 1e-4 / a.max()
    s_hi = 50.0 / a.min()

    def integrand(s, aa):
        return np.expm1(-s * aa) * s ** (-1.0 - sigma)

    head = _power_exp_head(-sigma, a, s_lo, start=1)
    # ∫_{s_hi}^∞ (e^{-sa} - 1) s^{-1-σ} ds, the exponential part is below e^{-50}
    tail = -(s_hi ** (-sigma)) / sigma
    body = _log_trapezoid(integrand, a, s_lo, s_hi, quad_points) + head + tail
    return body / math.gamma(-sigma)


def frac_power_pos(
    spec: SpectralDecomposition, sigma: float, f, quad_points: int = 512, validate: bool = False, tol: float = 1e-5
) -> GridFunction:
    """L^{σ/2} f = 1/Γ(-σ) ∫_0^∞ (P_s f - f) ds/s^{1+σ}, 0 < σ < 1."""
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    _require_positive_ground(spec)
    out = apply_multiplier(spec, positive_power_multiplier(spec.eigenvalues, sigma, quad_points), f)
    if validate:
        _validate("positive power", out, fractional_power(spec, sigma / 2, f), f, tol)
    return out


# Laplace-transform-type multipliers -------------------------------------------


@dataclass(frozen=True)
class LaplaceSymbol:
    """Bounded a(s) on [0, ∞) with optional jump locations."""

    func: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple[float, ...] = ()
    name: str = "a"

    def __call__(self, s):
        return self.func(np.asarray(s, dtype=float))


def constant_symbol(value: float) -> LaplaceSymbol:
    return LaplaceSymbol(lambda s: np.full(np.shape(s), float(value)), (), f"constant:{value:g}")


def indicator_symbol(T: float) -> LaplaceSymbol:
    """a = 1 on [0, T], 0 afterwards; m(λ) = 1 - e^{-T√λ}."""
    return LaplaceSymbol(lambda s: (s <= T).astype(float), (float(T),), f"indicator:{T:g}")


def oscillating_symbol(freq: float = 1.0) -> LaplaceSymbol:
    return LaplaceSymbol(lambda s: np.cos(freq * s), (), f"cos:{freq:g}")


def _laplace_nodes(a_min: float, a_max: float, breakpoints, n: int):
    """Nodes/weights for ∫_0^∞ g(s) ds with g ~ e^{-s a}, a in [a_min, a_max]."""
    cuts = sorted(b for b in breakpoints if b > 0)
    nodes, weights = [], []
    left = 0.0
    x, w = np.polynomial.legendre.leggauss(n)
    for b in cuts:
        nodes.append(left + 0.5 * (b - left) * (x + 1))
        weights.append(0.5 * (b - left) * w)
        left = b
    # semi-infinite piece: s = left + e^y, trapezoid in y
    d, dy = _log_nodes(1e-12 / a_max, 50.0 / a_min, n)
    wt = np.full(n, dy) * d
    wt[0] *= 0.5
    wt[-1] *= 0.5
    nodes.append(left + d)
    weights.append(wt)
    return np.concatenate(nodes), np.concatenate(weights)


def laplace_symbol_values(lam: np.ndarray, a: Callable, quad_points: int = 512) -> np.ndarray:
    """m(λ) = √λ ∫_0^∞ e^{-s√λ} a(s) ds by quadrature."""
    root = np.sqrt(np.asarray(lam, dtype=float))
    s, w = _laplace_nodes(root.min(), root.max(), getattr(a, "breakpoints", ()), quad_points)
    aw = np.asarray(a(s)) * w
    out = np.empty(root.shape, dtype=np.result_type(aw, float))
    for start in range(0, root.size, 2048):
        r = root[start : start + 2048, None]
        out[start : start + 2048] = r[:, 0] * (np.exp(-r * s[None, :]) @ aw)
    return out


def laplace_multiplier_semigroup_route(spec: SpectralDecomposition, a: Callable, f, quad_points: int = 512) -> GridFunction:
    """-∫_0^∞ ∂_s P_s f a(s) ds, summing the vectors ∂_s P_s f node by node."""
    lam = spec.eigenvalues
    root = np.sqrt(lam)
    s, w = _laplace_nodes(root.min(), root.max(), getattr(a, "breakpoints", ()), quad_points)
    aw = np.asarray(a(s)) * w
    coeffs = spec.coefficients(_samples(f))
    acc = np.zeros(spec.grid.n_points, dtype=complex)
    for si, wi in zip(s, aw):
        if wi == 0:
            continue
        acc += wi * spec.synthesize(root * np.exp(-si * root) * coeffs)
    return _finish(spec, acc)


def laplace_multiplier(
    spec: SpectralDecomposition,
    a: Callable,
    f,
    quad_points: int = 512,
    check_routes: bool = False,
    tol: float = 1e-6,
) -> GridFunction:
    """m(L) f with m(λ) = √λ ∫_0^∞ e^{-s√λ} a(s) ds."""
    _require_positive_ground(spec)
    out = apply_multiplier(spec, laplace_symbol_values(spec.eigenvalues, a, quad_points), f)
    if check_routes:
        other = laplace_multiplier_semigroup_route(spec, a, f, quad_points)
        _validate("laplace multiplier routes", out, other, f, tol)
    return out


# ---------------------------------------------------------------------------
# spectral identities used by the square-function machinery


def square_function_constant(beta: float) -> float:
    """∫_0^∞ t^{2β} λ^β e^{-2t√λ} dt/t = Γ(2β)/4^β for every λ > 0."""
    return math.gamma(2 * beta) / 4.0**beta


def log_time_tails(lam_pair_sum: np.ndarray, lam_pair_prod: np.ndarray, beta: float, tgrid: TimeGrid) -> np.ndarray:
    """∫ over (0, t_min) ∪ (t_max, ∞) of t^{2β} (λ_kλ_l)^{β/2} e^{-t(√λ_k+√λ_l)} dt/t.

    ``lam_pair_sum`` is √λ_k + √λ_l and ``lam_pair_prod`` is √λ_k √λ_l.
    """
    s = np.asarray(lam_pair_sum, dtype=float)
    p = np.asarray(lam_pair_prod, dtype=float)
    out = np.zeros(np.broadcast(s, p).shape)
    live = (s > 0) & (p > 0)
    ss = np.broadcast_to(s, out.shape)[live]
    pp = np.broadcast_to(p, out.shape)[live]
    g = math.gamma(2 * beta)
    low = special.gammainc(2 * beta, tgrid.t_min * ss)
    high = special.gammaincc(2 * beta, tgrid.t_max * ss)
    out[live] = g * pp**beta * ss ** (-2 * beta) * (low + high)
    return out
