"""Experiment suites that turn the numerical machinery into pass/fail verdicts.

A suite measures empirical constants on a base grid and on its one-step
refinement, and files every number as a :class:`CheckRecord`.  The suite
passes iff all of its mandatory records pass; non-mandatory records are
evidence only.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .calculus import (
    FourierDecomposition,
    FractionalOrder,
    GridFunction,
    SpectralDecomposition,
    TimeGrid,
    constant_symbol,
    decompose,
    default_time_grid,
    frac_deriv_multiplier,
    frac_deriv_poisson_spectral,
    frac_deriv_quadrature,
    frac_power_neg,
    frac_power_pos,
    fractional_power,
    free_decomposition,
    heat_kernel,
    indicator_symbol,
    laplace_multiplier,
    log_time_tails,
    oscillating_symbol,
    poisson_derivative_kernel,
    poisson_kernel,
    poisson_spectral,
    poisson_subordination,
    q_kernel,
    square_function_constant,
)
from .lattice import (
    BallFamily,
    CriticalRadiusField,
    PeriodicGrid,
    Potential,
    RhoInfiniteError,
    check_rho_comparability,
    constant_potential,
    critical_radius_field,
    parse_potential,
)
from .regularity import (
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
)
from .testfns import TestFunctionSpec, log_bump, weierstrass

# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Problem:
    """Grid size, period and potential recipe of one experiment."""

    n_points: int = 256
    period: float = 8.0
    potential: str = "quadratic"
    n_dim: int = 1
    time_points: int = 64
    backend: str = "auto"

    def refined(self, factor: int = 2) -> "Problem":
        return replace(self, n_points=self.n_points * factor)

    def with_potential(self, text: str) -> "Problem":
        return replace(self, potential=text)

    @property
    def constant_level(self) -> float | None:
        kind, _, arg = self.potential.partition(":")
        return float(arg) if kind.strip() == "constant" else None


@dataclass(frozen=True)
class Workspace:
    problem: Problem
    grid: PeriodicGrid
    potential: Potential
    spec: SpectralDecomposition
    rho: CriticalRadiusField | None
    tgrid: TimeGrid


@lru_cache(maxsize=8)
def workspace(problem: Problem) -> Workspace:
    """Grid, eigensystem, critical radii and default time grid (cached)."""
    grid = PeriodicGrid(problem.n_points, problem.period)
    v = parse_potential(problem.potential, grid)
    spec = decompose(grid, v, problem.backend)
    try:
        rho = critical_radius_field(grid, v, problem.n_dim)
    except RhoInfiniteError:
        rho = None
    return Workspace(problem, grid, v, spec, rho, default_time_grid(grid, problem.time_points))


@dataclass(frozen=True)
class Tolerances:
    band: float = 10.0
    stability: float = 0.20
    rho_stability: float = 0.05
    uniformity: float = 0.15
    lipschitz_growth: float = 1.8
    identity: float = 1e-6
    isometry: float = 0.01
    reconstruction: float = 1e-3
    closed_form: float = 1e-8
    spectrum: float = 1e-10
    oracle: float = 1e-5
    positivity: float = 1e-12
    fit_residual: float = 0.2

    def scaled(self, factor: float) -> "Tolerances":
        """Loosen (factor > 1) or tighten (factor < 1) every tolerance at once."""
        if not factor > 0:
            raise ValueError("tolerance scale must be positive")
        loose = {k: v * factor for k, v in asdict(self).items()}
        loose["lipschitz_growth"] = self.lipschitz_growth / factor
        return Tolerances(**loose)


def config_hash(*parts) -> str:
    text = json.dumps(parts, sort_keys=True, default=_plain)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _plain(obj):
    if isinstance(obj, (Problem, Tolerances)):
        return asdict(obj)
    if isinstance(obj, TestFunctionSpec):
        return obj.label
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (tuple, list, np.ndarray)):
        return [_plain(o) for o in obj]
    return str(obj)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CheckRecord:
    quantity: str
    value: float
    tolerance: float
    relation: str
    passed: bool
    stability: float | None
    config_hash: str
    mandatory: bool = True
    kind: str = "property"
    note: str = ""


@dataclass(frozen=True)
class Curve:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]


@dataclass
class VerdictReport:
    suite: str
    config_hash: str
    parameters: dict
    records: list[CheckRecord] = field(default_factory=list)
    curves: list[Curve] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records if r.mandatory)

    @property
    def oracle_failed(self) -> bool:
        return any(not r.passed for r in self.records if r.mandatory and r.kind == "oracle")

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.mandatory and not r.passed]

    def record(self, quantity: str) -> CheckRecord:
        for r in self.records:
            if r.quantity == quantity:
                return r
        raise KeyError(quantity)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config_hash": self.config_hash,
            "parameters": _json_safe(self.parameters),
            "passed": self.passed,
            "records": [_json_safe(asdict(r)) for r in self.records],
            "curves": [{"name": c.name, "columns": list(c.columns)} for c in self.curves],
        }


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if obj is None or isinstance(obj, str):
        return obj
    return _plain(obj)


def _ratio(a: float, b: float) -> float:
    """a / b with 0/0 = 1 and x/0 = inf."""
    if a == 0 and b == 0:
        return 1.0
    if b == 0:
        return math.inf
    return a / b


class _Ledger:
    """Collects records for one suite run."""

    def __init__(self, chash: str, tol: Tolerances):
        self.chash = chash
        self.tol = tol
        self.records: list[CheckRecord] = []

    def add(self, quantity, value, tolerance, relation, passed, stability=None, mandatory=True, kind="property", note=""):
        self.records.append(
            CheckRecord(
                quantity,
                float(value),
                float(tolerance),
                relation,
                bool(passed),
                None if stability is None else float(stability),
                self.chash,
                mandatory,
                kind,
                note,
            )
        )

    def stable(self, quantity, base, fine, tolerance=None, mandatory=True):
        tolerance = self.tol.stability if tolerance is None else tolerance
        ratio = _ratio(fine, base)
        ok = math.isfinite(base) and math.isfinite(fine) and abs(ratio - 1.0) <= tolerance
        self.add(quantity, base, tolerance, "finite, |refined/base - 1| <=", ok, ratio, mandatory)

    def band(self, quantity, a, b, mandatory=True):
        r = _ratio(a, b)
        ok = 1.0 / self.tol.band <= r <= self.tol.band
        self.add(quantity, r, self.tol.band, "ratio in [1/band, band]", ok, mandatory=mandatory)

    def at_most(self, quantity, value, limit, kind="property", mandatory=True, note=""):
        ok = math.isfinite(value) and value <= limit
        self.add(quantity, value, limit, "<=", ok, kind=kind, mandatory=mandatory, note=note)

    def at_least(self, quantity, value, limit, mandatory=True, note=""):
        self.add(quantity, value, limit, ">=", value >= limit, mandatory=mandatory, note=note)


def _family(specs: Iterable[str | TestFunctionSpec]) -> list[TestFunctionSpec]:
    return [s if isinstance(s, TestFunctionSpec) else TestFunctionSpec.parse(s) for s in specs]


def _ball_family(ws: Workspace, base_points: int) -> BallFamily:
    """Dyadic balls whose centers and radii do not move under refinement."""
    stride = max(ws.grid.n_points // base_points, 1)
    min_radius = 2.0 * ws.grid.period / base_points
    return BallFamily.dyadic(ws.grid, range(0, ws.grid.n_points, stride), min_radius)


def _require_rho(ws: Workspace) -> CriticalRadiusField:
    if ws.rho is None:
        raise ValueError("this suite needs a potential that is not identically zero")
    return ws.rho


def _require_constant(problem: Problem) -> float:
    mu = problem.constant_level
    if mu is None or not mu > 0:
        raise ValueError("this suite needs a constant positive potential 'constant:MU'")
    return mu


def _both(problem: Problem, measure) -> tuple[dict, dict]:
    base = measure(workspace(problem), problem.n_points)
    fine = measure(workspace(problem.refined()), problem.n_points)
    return base, fine


# ---------------------------------------------------------------------------
# oracles and closed forms


def verify_oracles(problem: Problem, n_probes: int = 10, seed: int = 0, tol: Tolerances = Tolerances()) -> VerdictReport:
    """Quadrature routes against their spectral closed forms on random probes."""
    if n_probes < 1:
        raise ValueError("need at least one probe")
    params = {"problem": asdict(problem), "n_probes": n_probes, "seed": seed}
    chash = config_hash("oracles", params, tol)
    led = _Ledger(chash, tol)
    ws = workspace(problem)
    spec = ws.spec
    rng = np.random.default_rng(seed)
    positive = spec.ground_energy > 0
    worst: dict[str, float] = {}

    def note(name, approx, exact, f):
        err = float(np.max(np.abs(approx.samples - exact.samples))) / float(np.max(np.abs(f)))
        worst[name] = max(worst.get(name, 0.0), err)

    for _ in range(n_probes):
        f = rng.standard_normal(ws.grid.n_points)
        t = 10.0 ** rng.uniform(-2.0, 1.0)
        note("subordination Poisson", poisson_subordination(spec, t, f), poisson_spectral(spec, t, f), f)
        order = FractionalOrder(float(rng.uniform(0.2, 3.0)))
        note(
            "Segovia-Wheeden derivative",
            frac_deriv_quadrature(spec, order, t, f),
            frac_deriv_poisson_spectral(spec, order, t, f),
            f,
        )
        if not positive:
            continue
        sigma = float(rng.uniform(0.1, 1.9))
        note("negative power", frac_power_neg(spec, sigma, f), fractional_power(spec, -sigma / 2, f), f)
        sigma = float(rng.uniform(0.1, 0.9))
        note("positive power", frac_power_pos(spec, sigma, f), fractional_power(spec, sigma / 2, f), f)
        root = np.sqrt(spec.eigenvalues)
        exact = GridFunction(spec.synthesize((1.0 - np.exp(-t * root)) * spec.coefficients(f)), ws.grid)
        note("Laplace multiplier (indicator)", laplace_multiplier(spec, indicator_symbol(t), f), exact.real_if_close(), f)
        freq = float(rng.uniform(0.5, 3.0))
        lam = spec.eigenvalues
        exact = GridFunction(spec.synthesize(lam / (lam + freq**2) * spec.coefficients(f)), ws.grid)
        note("Laplace multiplier (cosine)", laplace_multiplier(spec, oscillating_symbol(freq), f), exact.real_if_close(), f)

    for name, err in worst.items():
        led.at_most(f"{name}: max |quadrature - spectral| / |f|_inf", err, tol.oracle, kind="oracle")

    mu = problem.constant_level or 1.0
    grid = ws.grid
    dense = decompose(grid, constant_potential(grid, mu), "dense")
    k = np.arange(grid.n_points)
    closed = np.sort(4.0 / grid.spacing**2 * np.sin(np.pi * k / grid.n_points) ** 2 + mu)
    rel = float(np.max(np.abs(dense.eigenvalues - closed) / closed))
    led.at_most(f"constant potential {mu:g}: eigenvalues vs closed form (relative)", rel, tol.spectrum, kind="oracle")
    return VerdictReport("oracles", chash, params, led.records)


def verify_critical_radius(problem: Problem, mu: float = 1.0, k0: float = 1.0, tol: Tolerances = Tolerances()) -> VerdictReport:
    """ρ for a constant potential in closed form; comparability constant under refinement."""
    params = {"problem": asdict(problem), "mu": mu, "k0": k0}
    chash = config_hash("critical_radius", params, tol)
    led = _Ledger(chash, tol)
    grid = PeriodicGrid(problem.n_points, problem.period)
    rho = critical_radius_field(grid, constant_potential(grid, mu)).values
    expected = 1.0 / math.sqrt(2.0 * mu)
    led.at_most(
        f"rho for V = {mu:g} vs 1/sqrt(2 mu) (relative)",
        float(np.max(np.abs(rho - expected))) / expected,
        tol.closed_form,
        kind="closed_form",
    )
    base, fine = _both(problem, lambda ws, _: {"c": check_rho_comparability(_require_rho(ws), k0)})
    led.stable(f"comparability constant c (k0 = {k0:g})", base["c"], fine["c"], tol.rho_stability)
    return VerdictReport("critical_radius", chash, params, led.records)


# ---------------------------------------------------------------------------
# Hölder regularity of fractional powers and multipliers


def verify_thm12(
    problem: Problem,
    alpha: float,
    sigma: float,
    family: Sequence[str | TestFunctionSpec] | None = None,
    cutoff: float = 1.0,
    frequency: float = 1.0,
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """Operator-norm ratios of L^{-σ/2}, L^{σ/2} and m(L) on Hölder spaces."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    do_neg, do_pos = alpha + sigma < 1, sigma < alpha
    if not (do_neg or do_pos):
        raise ValueError("need alpha + sigma < 1 or sigma < alpha")
    fam = _family(family or (f"holder_cusp:alpha={alpha}",))
    params = {
        "problem": asdict(problem),
        "alpha": alpha,
        "sigma": sigma,
        "family": [s.label for s in fam],
        "cutoff": cutoff,
        "frequency": frequency,
    }
    chash = config_hash("thm12", params, tol)
    led = _Ledger(chash, tol)
    symbols = (indicator_symbol(cutoff), oscillating_symbol(frequency))

    def measure(ws: Workspace, _):
        rho = _require_rho(ws)
        out = {}
        for s in fam:
            f = s.build(ws.grid, ws.spec)
            base = holder_norm(f, alpha, rho).total

            def ratio(g, exponent):
                num = holder_norm(g.real_if_close(), exponent, rho).total
                return 0.0 if num == 0 else _ratio(num, base)

            if do_neg:
                g = frac_power_neg(ws.spec, sigma, f, validate=True, tol=tol.oracle)
                out[(s.label, "negative power")] = ratio(g, alpha + sigma)
            if do_pos:
                g = frac_power_pos(ws.spec, sigma, f, validate=True, tol=tol.oracle)
                out[(s.label, "positive power")] = ratio(g, alpha - sigma)
            for a in symbols:
                g = laplace_multiplier(ws.spec, a, f, check_routes=True, tol=tol.oracle)
                out[(s.label, f"multiplier {a.name}")] = ratio(g, alpha)
            ident = laplace_multiplier(ws.spec, constant_symbol(1.0), f)
            out[(s.label, "identity")] = float(np.max(np.abs(ident.samples - f.samples)))
        return out

    base, fine = _both(problem, measure)
    for key in base:
        label, what = key
        if what == "identity":
            led.at_most(f"{label}: multiplier a = 1, max |m(L)f - f|", max(base[key], fine[key]), tol.identity)
        else:
            led.stable(f"{label}: {what} Hölder ratio", base[key], fine[key])
    if not do_neg:
        led.add("negative power part skipped (alpha + sigma >= 1)", math.nan, math.nan, "n/a", True, mandatory=False)
    if not do_pos:
        led.add("positive power part skipped (sigma >= alpha)", math.nan, math.nan, "n/a", True, mandatory=False)
    return VerdictReport("thm12", chash, params, led.records)


# ---------------------------------------------------------------------------
# Hölder norm, growth constant and Carleson constant


def verify_thm13(
    problem: Problem,
    alpha: float,
    beta_list: Sequence[float] = (1.0, 1.5),
    family: Sequence[str | TestFunctionSpec] | None = None,
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """The triple (‖f‖_{C^{0,α}}, c_{1,β}, [dμ_f]_{α,β}): comparable and refinement-stable."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if any(b <= alpha for b in beta_list):
        raise ValueError("every beta must exceed alpha")
    fam = _family(family or (f"holder_cusp:alpha={alpha}",))
    params = {"problem": asdict(problem), "alpha": alpha, "betas": list(beta_list), "family": [s.label for s in fam]}
    chash = config_hash("thm13", params, tol)
    led = _Ledger(chash, tol)
    curves: dict[str, list[float]] = {}

    def measure(ws: Workspace, base_points):
        rho = _require_rho(ws)
        balls = _ball_family(ws, base_points)
        out = {}
        for s in fam:
            f = s.build(ws.grid, ws.spec)
            norm = holder_norm(f, alpha, rho).total
            for b in beta_list:
                F = poisson_derivative_field(ws.spec, FractionalOrder(b), f, ws.tgrid)
                out[(s.label, b)] = (norm, sup_growth_constant(F, alpha), carleson_functional(F, alpha, balls).supremum)
                if ws.grid.n_points == base_points:
                    curves[f"{s.label} beta={b:g}"] = list(growth_profile(F))
        return out

    base, fine = _both(problem, measure)
    names = ("Hölder norm", "growth constant c1", "Carleson constant")
    for (label, b), triple in base.items():
        tag = f"{label} beta={b:g}"
        for name, x, y in zip(names, triple, fine[(label, b)]):
            led.stable(f"{tag}: {name}", x, y)
        for i in range(3):
            for j in range(i + 1, 3):
                # judge the ratio at both resolutions by its distance from 1 on a log scale
                pair = [_ratio(t[i], t[j]) for t in (triple, fine[(label, b)])]
                worst = max(pair, key=lambda r: abs(math.log(r)) if 0 < r < math.inf else math.inf)
                led.band(f"{tag}: {names[i]} / {names[j]}", worst, 1.0)
    tgrid = workspace(problem).tgrid
    columns = ("t",) + tuple(curves)
    rows = tuple(zip(tgrid.points, *curves.values()))
    curve = Curve("growth_profile", columns, tuple(tuple(float(v) for v in r) for r in rows))
    return VerdictReport("thm13", chash, params, led.records, [curve])


# ---------------------------------------------------------------------------
# the Lipschitz endpoint


def verify_thm14(
    mu: float = 1.0,
    beta_list: Sequence[float] = (2.0,),
    K_list: Sequence[int] = (4, 8, 16),
    period: float = 1.0,
    n_points: int = 256,
    lipschitz_family: Sequence[str | TestFunctionSpec] = ("holder_cusp:alpha=1", "random_smooth:seed=0"),
    max_shifts: int = 200,
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """Weierstrass truncations: bounded growth constant, diverging Lipschitz constant."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not float(period).is_integer():
        raise ValueError("the period must be an integer")
    if len(K_list) < 3 or list(K_list) != sorted(set(K_list)):
        raise ValueError("need at least three increasing truncation levels")
    if any(b <= 1 for b in beta_list):
        raise ValueError("every beta must exceed 1")
    fam = _family(lipschitz_family)
    params = {
        "mu": mu,
        "betas": list(beta_list),
        "K": list(K_list),
        "period": period,
        "n_points": n_points,
        "lipschitz_family": [s.label for s in fam],
        "max_shifts": max_shifts,
    }
    chash = config_hash("thm14", params, tol)
    led = _Ledger(chash, tol)

    rows = []
    for K in K_list:
        n = max(1024, 4 * 2**K * int(period))
        grid = PeriodicGrid(n, period)
        spec = FourierDecomposition(grid, mu)
        tgrid = default_time_grid(grid)
        f = weierstrass(grid, K)
        c1 = [float(np.max(streamed_growth_profile(spec, FractionalOrder(b), f, tgrid) / tgrid.points)) for b in beta_list]
        shifts = None if n <= 4096 else max_shifts
        rows.append((K, n, *c1, holder_seminorm(f, 1.0, shifts), second_difference_constant(f, 1.0, shifts)))
    table = np.array(rows, dtype=float)
    ks = table[:, 0]
    lip, sd = table[:, -2], table[:, -1]

    def spread(values):
        return float(values.max() / values.min() - 1.0)

    for i, b in enumerate(beta_list):
        led.at_most(f"growth constant c1 (beta={b:g}, alpha=1): max/min - 1 over K", spread(table[:, 2 + i]), tol.uniformity)
    led.at_most("second-difference constant: max/min - 1 over K", spread(sd), tol.uniformity)
    led.at_least(
        f"Lipschitz constant ratio K={K_list[-1]} / K={K_list[-2]}", lip[-1] / lip[-2], tol.lipschitz_growth
    )
    slope = float(np.polyfit(ks, lip, 1)[0])
    led.add(
        "Lipschitz constant increasing in K (fitted slope per level)",
        slope,
        0.0,
        "strictly increasing",
        bool(np.all(np.diff(lip) > 0)),
    )

    problem = Problem(n_points, period, f"constant:{mu}")

    def measure(ws: Workspace, base_points):
        balls = _ball_family(ws, base_points)
        out = {}
        for s in fam:
            f = s.build(ws.grid, ws.spec)
            norm = holder_norm(f, 1.0, _require_rho(ws)).total
            for b in beta_list:
                F = poisson_derivative_field(ws.spec, FractionalOrder(b), f, ws.tgrid)
                out[(s.label, b)] = _ratio(carleson_functional(F, 1.0, balls).supremum, norm)
        return out

    base, fine = _both(problem, measure)
    for (label, b), value in base.items():
        led.stable(f"{label} beta={b:g}: Carleson constant / Lipschitz norm", value, fine[(label, b)])

    columns = ("K", "n_points", *(f"c1_beta={b:g}" for b in beta_list), "lipschitz", "second_difference")
    curve = Curve("weierstrass_truncations", columns, tuple(tuple(float(v) for v in r) for r in rows))
    return VerdictReport("thm14", chash, params, led.records, [curve])


# ---------------------------------------------------------------------------
# the BMO endpoint


def verify_thm15(
    problem: Problem,
    beta: float = 1.0,
    family: Sequence[str | TestFunctionSpec] = ("constant", "log_bump", "random_smooth:seed=0"),
    pointwise_points: tuple[int, int] = (2**15, 2**16),
    pointwise_period: float = 4.0,
    t_range: tuple[float, float] = (1e-3, 1e-1),
    t_count: int = 17,
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """(A) Carleson at α = 0 against the BMO norm; (B) pointwise growth at the log singularity."""
    mu = _require_constant(problem)
    if problem.period < 4 or pointwise_period < 4:
        raise ValueError("log_bump needs a period of at least 4")
    fam = _family(family)
    params = {
        "problem": asdict(problem),
        "beta": beta,
        "family": [s.label for s in fam],
        "pointwise_points": list(pointwise_points),
        "pointwise_period": pointwise_period,
        "t_range": list(t_range),
        "t_count": t_count,
    }
    chash = config_hash("thm15", params, tol)
    led = _Ledger(chash, tol)

    def measure(ws: Workspace, base_points):
        rho = _require_rho(ws)
        balls = _ball_family(ws, base_points)
        out = {}
        for s in fam:
            f = s.build(ws.grid, ws.spec)
            F = poisson_derivative_field(ws.spec, FractionalOrder(beta), f, ws.tgrid)
            out[s.label] = _ratio(carleson_functional(F, 0.0, balls).supremum, bmo_alpha_norm(f, 0.0, balls, rho))
        return out

    base, fine = _both(problem, measure)
    for label in base:
        led.stable(f"{label}: Carleson(alpha=0) / BMO norm", base[label], fine[label], mandatory=False)
    led.stable("one constant C over the family", max(base.values()), max(fine.values()))

    # (B) the harmonic extension of the log bump at the origin
    t = np.geomspace(t_range[0], t_range[1], t_count)
    order = FractionalOrder(beta)
    logs = np.log(1.0 / t)
    values, slopes, residuals = [], [], []
    for n in pointwise_points:
        grid = PeriodicGrid(n, pointwise_period)
        spec = FourierDecomposition(grid, mu)
        coeffs = spec.coefficients(log_bump(grid).samples)
        v = np.array(
            [
                abs(spec.synthesize(ti**beta * frac_deriv_multiplier(spec.eigenvalues, order, ti) * coeffs)[grid.origin_index])
                for ti in t
            ]
        )
        c = float(v @ logs / (logs @ logs))
        values.append(v)
        slopes.append(c)
        residuals.append(float(np.sqrt(np.mean((v - c * logs) ** 2) / np.mean(v**2))))
    led.stable("log_bump: fitted slope c in |F(0, t)| ~ c log(1/t)", slopes[0], slopes[1])
    led.at_most("log_bump: relative RMS residual of the log fit", residuals[-1], tol.fit_residual)
    # values are stored in increasing t, so growth as t decreases means a decreasing sequence
    steps = np.diff(values[-1])
    led.add(
        "log_bump: |F(0, t)| increasing as t decreases (worst step)",
        float(steps.max()),
        0.0,
        "all steps < 0",
        bool(np.all(steps < 0)),
    )
    columns = ("t", *(f"abs_F0_n={n}" for n in pointwise_points))
    curve = Curve("log_bump_origin", columns, tuple(tuple(float(x) for x in r) for r in zip(t, *values)))
    return VerdictReport("thm15", chash, params, led.records, [curve])


# ---------------------------------------------------------------------------
# kernel estimates


def _periodized_gaussian(grid: PeriodicGrid, t: float) -> np.ndarray:
    x = grid.coordinates
    diff = x[:, None] - x[None, :]
    images = int(math.ceil(math.sqrt(40.0 * t) / grid.period)) + 1
    total = sum(np.exp(-((diff + m * grid.period) ** 2) / (4.0 * t)) for m in range(-images, images + 1))
    return total / math.sqrt(4.0 * math.pi * t)


def verify_kernel_bounds(
    problem: Problem,
    heat_times: Sequence[float] | None = None,
    poisson_times: Sequence[float] | None = None,
    decay: float = 2.0,
    beta_list: Sequence[float] = (1.0, 1.5),
    delta: float = 2.0,
    gaussian_c: float = 0.1,
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """Empirical envelope constants of k_t, P_t, t^β∂_t^βP_t and Q_t, plus row sums."""
    P = problem.period
    h = P / problem.n_points
    heat = np.asarray(heat_times if heat_times is not None else np.geomspace(P * h, (P / 4) ** 2, 6), dtype=float)
    pois = np.asarray(poisson_times if poisson_times is not None else np.geomspace(math.sqrt(P * h), P / 4, 6), dtype=float)
    if heat.max() > (P / 4) ** 2 * (1 + 1e-12) or pois.max() > P / 4 * (1 + 1e-12):
        raise ValueError("time samples exceed the periodization regime t <= (P/4)^2 (heat), t <= P/4 (Poisson)")
    if heat.min() <= 0 or pois.min() <= 0:
        raise ValueError("time samples must be positive")
    params = {
        "problem": asdict(problem),
        "heat_times": heat.tolist(),
        "poisson_times": pois.tolist(),
        "decay": decay,
        "betas": list(beta_list),
        "delta": delta,
        "gaussian_c": gaussian_c,
    }
    chash = config_hash("kernels", params, tol)
    led = _Ledger(chash, tol)

    def measure(ws: Workspace, _):
        rho = np.asarray(_require_rho(ws).values)
        rx, ry = rho[:, None], rho[None, :]
        x = ws.grid.coordinates
        d = ws.grid.periodic_distance(x[:, None], x[None, :])
        out = {"heat min": math.inf, "poisson min": math.inf, "heat": 0.0, "heat_gap": 0.0, "q": 0.0}
        out["poisson"] = 0.0
        for t in heat:
            k = heat_kernel(ws.spec, t)
            gauss = t**-0.5 * np.exp(-(d**2) / (5 * t))
            out["heat min"] = min(out["heat min"], float(k.min()))
            env = gauss * (1 + math.sqrt(t) / rx + math.sqrt(t) / ry) ** (-decay)
            out["heat"] = max(out["heat"], float(np.max(k / env)))
            gap = np.abs(k - _periodized_gaussian(ws.grid, t))
            out["heat_gap"] = max(out["heat_gap"], float(np.max(gap / ((math.sqrt(t) / rx) ** delta * gauss))))
        for t in pois:
            s = np.sqrt(d**2 + t**2)
            fac = (1 + s / rx + s / ry) ** (-decay)
            pk = poisson_kernel(ws.spec, t)
            out["poisson min"] = min(out["poisson min"], float(pk.min()))
            out["poisson"] = max(out["poisson"], float(np.max(np.abs(pk) / (t / s**2 * fac))))
            for b in beta_list:
                key = f"deriv beta={b:g}"
                kb = np.abs(poisson_derivative_kernel(ws.spec, FractionalOrder(b), t))
                out[key] = max(out.get(key, 0.0), float(np.max(kb / (t**b / s ** (1 + b) * fac))))
            qk = np.abs(q_kernel(ws.spec, t))
            env = np.exp(-gaussian_c * d**2 / t**2) / t * (1 + t / rx + t / ry) ** (-decay)
            out["q"] = max(out["q"], float(np.max(qk / env)))
        return out

    base, fine = _both(problem, measure)
    led.at_least("heat kernel minimum entry", min(base["heat min"], fine["heat min"]), -tol.positivity)
    led.at_least("Poisson kernel minimum entry", min(base["poisson min"], fine["poisson min"]), -tol.positivity)
    labels = {
        "heat": "heat kernel Gaussian envelope constant",
        "heat_gap": "heat kernel minus periodized Gaussian, envelope constant",
        "q": "Q_t Gaussian envelope constant",
        "poisson": "Poisson kernel envelope constant",
    }
    for key, value in base.items():
        if "min" in key:
            continue
        what = labels.get(key, f"t^beta d_t^beta P_t envelope constant ({key.split()[-1]})")
        led.stable(what, value, fine[key])

    # row sums on the constant potential, where the constant mode is exact
    mu = problem.constant_level or 1.0
    ws = workspace(replace(problem, potential=f"constant:{mu}"))
    rho = 1.0 / math.sqrt(2.0 * mu)
    times = np.geomspace(1e-2, P / 4, 9)
    h_grid = ws.grid.spacing
    err = 0.0
    shape_q = 0.0
    shape_b: dict[float, float] = {}
    for t in times:
        rows = h_grid * q_kernel(ws.spec, t).sum(axis=1)
        err = max(err, float(np.max(np.abs(rows - (-(t**2) * mu * math.exp(-(t**2) * mu))))))
        env = (t / rho) ** delta * (1 + t / rho) ** (-decay)
        shape_q = max(shape_q, float(np.max(np.abs(rows))) / env)
        for b in beta_list:
            order = FractionalOrder(b)
            rows = h_grid * poisson_derivative_kernel(ws.spec, order, t).sum(axis=1)
            closed = order.phase * (t * math.sqrt(mu)) ** b * math.exp(-t * math.sqrt(mu))
            err = max(err, float(np.max(np.abs(rows - closed))))
            env = (t / rho) ** min(b, delta) * (1 + t / rho) ** (-decay)
            shape_b[b] = max(shape_b.get(b, 0.0), float(np.max(np.abs(rows))) / env)
    led.at_most(f"row sums on V = {mu:g} vs ground-mode closed forms", err, tol.closed_form, kind="closed_form")
    led.at_most("Q_t row-sum shape constant", shape_q, math.inf, note=f"delta'={delta:g}, N={decay:g}")
    for b, c in shape_b.items():
        led.at_most(
            f"t^beta d_t^beta P_t row-sum shape constant (beta={b:g})",
            c,
            math.inf,
            note=f"delta'={min(b, delta):g}, N={decay:g}",
        )
    return VerdictReport("kernels", chash, params, led.records)


# ---------------------------------------------------------------------------
# isometry and reproducing formula


def verify_reproducing(
    problem: Problem,
    beta_list: Sequence[float] = (0.5, 1.0, 1.7),
    probes: Sequence[str | TestFunctionSpec] = ("random_smooth:seed=0",),
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """‖g_β f‖²/‖f‖² against Γ(2β)/4^β and the reconstruction under both phase conventions."""
    fam = _family(probes)
    params = {"problem": asdict(problem), "betas": list(beta_list), "probes": [s.label for s in fam]}
    chash = config_hash("reproducing", params, tol)
    led = _Ledger(chash, tol)
    ws = workspace(problem)
    spec, tgrid = ws.spec, ws.tgrid
    lam = spec.eigenvalues
    root = np.sqrt(np.maximum(lam, 0.0))
    for b in beta_list:
        order = FractionalOrder(b)
        constant = square_function_constant(b)
        # Σ_t w_t (t^β ∂_t^β P_t)² in the eigenbasis, plus the exact outside-window tails
        weights = tgrid.weights
        squared = sum(w * (t**b * frac_deriv_multiplier(lam, order, t)) ** 2 for t, w in zip(tgrid.points, weights))
        tails = log_time_tails(2.0 * root, root * root, b, tgrid)
        with_phase = (squared + order.phase**2 * tails) / constant
        without_phase = with_phase / order.phase**2
        for s in fam:
            f = s.build(ws.grid, spec)
            energy = square_function_gbeta(spec, b, f, tgrid).l2_norm() ** 2
            norm2 = f.l2_norm() ** 2
            ratio = _ratio(energy, norm2)
            led.at_most(
                f"{s.label} beta={b:g}: |g_beta f|^2/|f|^2 vs Gamma(2 beta)/4^beta (relative)",
                abs(ratio / constant - 1.0) if norm2 > 0 else 0.0,
                tol.isometry,
            )
            led.add(
                f"{s.label} beta={b:g}: |g_beta f|/|f| vs Gamma(beta) (relative)",
                abs(math.sqrt(ratio) / math.gamma(b) - 1.0) if norm2 > 0 else 0.0,
                tol.isometry,
                "<=",
                norm2 == 0 or abs(math.sqrt(ratio) / math.gamma(b) - 1.0) <= tol.isometry,
                mandatory=False,
                note="alternative normalization, reported only",
            )
            coeffs = spec.coefficients(f.samples)
            errors = {}
            for name, mult in (("with phase", with_phase), ("phase removed", without_phase)):
                recon = spec.synthesize(mult * coeffs)
                errors[name] = float(np.max(np.abs(recon - f.samples)))
            best = min(errors, key=errors.get)
            for name, e in errors.items():
                led.at_most(
                    f"{s.label} beta={b:g}: reconstruction max error ({name})",
                    e,
                    tol.reconstruction,
                    mandatory=name == best,
                    note="selected normalization" if name == best else "",
                )
    return VerdictReport("reproducing", chash, params, led.records)


# ---------------------------------------------------------------------------
# order independence, Zygmund class, growth lemma


def verify_growth_order_independence(
    problem: Problem,
    alpha: float,
    family: Sequence[str | TestFunctionSpec] | None = None,
    beta_pairs: Sequence[tuple[float, float]] = ((1.0, 2.0), (0.7, 1.3)),
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """c_{1,β} and c_{1,σ} of the same f are comparable."""
    if any(min(p) <= alpha for p in beta_pairs):
        raise ValueError("all orders must exceed alpha")
    fam = _family(family or (f"holder_cusp:alpha={alpha}",))
    params = {"problem": asdict(problem), "alpha": alpha, "family": [s.label for s in fam], "pairs": [list(p) for p in beta_pairs]}
    chash = config_hash("order", params, tol)
    led = _Ledger(chash, tol)
    orders = sorted({b for p in beta_pairs for b in p})

    def measure(ws: Workspace, _):
        out = {}
        for s in fam:
            f = s.build(ws.grid, ws.spec)
            for b in orders:
                F = poisson_derivative_field(ws.spec, FractionalOrder(b), f, ws.tgrid)
                out[(s.label, b)] = sup_growth_constant(F, alpha)
        return out

    base, fine = _both(problem, measure)
    for (label, b), value in base.items():
        led.stable(f"{label}: growth constant c1 (beta={b:g})", value, fine[(label, b)])
    for s in fam:
        for b1, b2 in beta_pairs:
            led.band(f"{s.label}: c1(beta={b1:g}) / c1(beta={b2:g})", base[(s.label, b1)], base[(s.label, b2)])
    return VerdictReport("order", chash, params, led.records)


def verify_zygmund_equivalence(
    problem: Problem,
    alpha: float,
    f: str | TestFunctionSpec | None = None,
    beta: float = 2.0,
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """Second differences against the L- and classical growth constants."""
    _require_constant(problem)
    if not 0 < alpha <= 1 or not beta > alpha:
        raise ValueError("need 0 < alpha <= 1 and beta > alpha")
    (fs,) = _family([f or f"holder_cusp:alpha={alpha}"])
    params = {"problem": asdict(problem), "alpha": alpha, "f": fs.label, "beta": beta}
    chash = config_hash("zygmund", params, tol)
    led = _Ledger(chash, tol)
    order = FractionalOrder(beta)

    def measure(ws: Workspace, _):
        g = fs.build(ws.grid, ws.spec)
        fl = poisson_derivative_field(ws.spec, order, g, ws.tgrid)
        fc = poisson_derivative_field(free_decomposition(ws.grid), order, g, ws.tgrid)
        t = ws.tgrid.points
        diff = np.max(np.abs(fl.values - fc.values), axis=0)
        return {
            "growth seminorm": rho_growth_seminorm(g, alpha, _require_rho(ws)),
            "second difference": second_difference_constant(g, alpha),
            "L growth": sup_growth_constant(fl, alpha),
            "classical growth": sup_growth_constant(fc, alpha),
            "difference": float(np.max(diff * t ** (-alpha))),
        }

    base, fine = _both(problem, measure)
    led.at_most("precondition |f| <= C rho^alpha: growth seminorm", base["growth seminorm"], math.inf)
    for key in ("second difference", "L growth", "classical growth"):
        led.stable(f"{key} constant", base[key], fine[key])
    led.band("second difference / L growth", base["second difference"], base["L growth"])
    led.band("second difference / classical growth", base["second difference"], base["classical growth"])
    led.band("L growth / classical growth", base["L growth"], base["classical growth"])
    led.stable("L minus classical: t^alpha envelope constant", base["difference"], fine["difference"])
    return VerdictReport("zygmund", chash, params, led.records)


def verify_growth_lemma21(
    problem: Problem,
    gamma: float,
    g: str | TestFunctionSpec | None = None,
    beta: float = 1.0,
    N_list: Sequence[float] = (1.0, 2.0),
    tol: Tolerances = Tolerances(),
) -> VerdictReport:
    """Smallest C with |s^β∂_s^βP_s g| <= C (ρ/s)^N (ρ^γ + s^γ)."""
    if not 0 < gamma < 1 or not beta > gamma:
        raise ValueError("need 0 < gamma < 1 and beta > gamma")
    (gs,) = _family([g or f"holder_cusp:alpha={gamma}"])
    params = {"problem": asdict(problem), "gamma": gamma, "g": gs.label, "beta": beta, "N": list(N_list)}
    chash = config_hash("lemma21", params, tol)
    led = _Ledger(chash, tol)

    def measure(ws: Workspace, _):
        rho = np.asarray(_require_rho(ws).values)[:, None]
        fn = gs.build(ws.grid, ws.spec)
        F = np.abs(poisson_derivative_field(ws.spec, FractionalOrder(beta), fn, ws.tgrid).values)
        s = ws.tgrid.points[None, :]
        out = {"growth seminorm": rho_growth_seminorm(fn, gamma, _require_rho(ws))}
        for n in N_list:
            out[n] = float(np.max(F / ((rho / s) ** n * (rho**gamma + s**gamma))))
        return out

    base, fine = _both(problem, measure)
    led.at_most("precondition |g| <= C rho^gamma: growth seminorm", base["growth seminorm"], math.inf)
    for n in N_list:
        led.stable(f"constant C (N={n:g})", base[n], fine[n])
    return VerdictReport("lemma21", chash, params, led.records)
