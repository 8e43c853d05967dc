"""Command line front end: ``schcalc [run|describe|spectrum] [flags]``.

Settings come from an optional ``key = value`` file given by ``--config``;
command line flags override it.  ``run`` writes one JSON report per suite
and one CSV per emitted curve into the output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path

import numpy as np

from .calculus import OracleMismatchError, decompose
from .lattice import PeriodicGrid, parse_potential
from .verifier import (
    Problem,
    Tolerances,
    VerdictReport,
    verify_critical_radius,
    verify_growth_lemma21,
    verify_growth_order_independence,
    verify_kernel_bounds,
    verify_oracles,
    verify_reproducing,
    verify_thm12,
    verify_thm13,
    verify_thm14,
    verify_thm15,
    verify_zygmund_equivalence,
)

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_SUITE_FAILED, EXIT_INVALID_CONFIG, EXIT_ORACLE_FAILED = 0, 1, 2, 3

SUITES = (
    "oracles",
    "critical_radius",
    "thm12",
    "thm13",
    "thm14",
    "thm15",
    "kernels",
    "reproducing",
    "order",
    "zygmund",
    "lemma21",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    grid_n: int = 256
    period: float = 8.0
    potential: str = "quadratic"
    dimension: int = 1
    time_points: int = 64
    alphas: tuple[float, ...] = (0.5,)
    betas: tuple[float, ...] = (1.0, 1.5)
    sigma: float = 0.3
    suites: tuple[str, ...] = ()
    out: str = "schcalc-out"
    seed: int = 0
    tolerance_scale: float = 1.0

    @property
    def problem(self) -> Problem:
        return Problem(self.grid_n, self.period, self.potential, self.dimension, self.time_points)

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances().scaled(self.tolerance_scale)

    @property
    def mu(self) -> float:
        """Level of the constant potential used by the suites that need one."""
        level = self.problem.constant_level
        return 1.0 if level is None else level

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")  # where the files go does not change what is in them
        return d


# ---------------------------------------------------------------------------
# parsing


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


_KEYS = {
    "grid_n": ("grid_n", int),
    "period": ("period", float),
    "potential": ("potential", str),
    "dimension": ("dimension", int),
    "time_points": ("time_points", int),
    "alpha": ("alphas", _floats),
    "beta": ("betas", _floats),
    "sigma": ("sigma", float),
    "suite": ("suites", lambda s: tuple(s.replace(",", " ").split())),
    "out": ("out", str),
    "seed": ("seed", int),
    "tolerance_scale": ("tolerance_scale", float),
}


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key == "suites":
            key = "suite"
        if not sep or key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value' with a known key, got {raw!r}")
        name, convert = _KEYS[key]
        try:
            values[name] = convert(value.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schcalc", description="Numerical checks for Schrödinger-operator regularity estimates.")
    p.add_argument("command", nargs="?", default="run", choices=("run", "describe", "spectrum"))
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--suite", action="append", metavar="NAME", help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--grid-n", type=int, metavar="INT")
    p.add_argument("--period", type=float, metavar="REAL")
    p.add_argument("--potential", metavar="SPEC", help="constant:MU, quadratic, well:DEPTH,WIDTH or file:PATH")
    p.add_argument("--alpha", type=float, action="append", metavar="REAL")
    p.add_argument("--beta", type=float, action="append", metavar="REAL")
    p.add_argument("--sigma", type=float, metavar="REAL")
    p.add_argument("--seed", type=int, metavar="INT")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--tolerance-scale", type=float, metavar="REAL")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    flags = {
        "grid_n": args.grid_n,
        "period": args.period,
        "potential": args.potential,
        "alphas": tuple(args.alpha) if args.alpha else None,
        "betas": tuple(args.beta) if args.beta else None,
        "sigma": args.sigma,
        "suites": tuple(args.suite) if args.suite else None,
        "seed": args.seed,
        "out": args.out,
        "tolerance_scale": args.tolerance_scale,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    return replace(RunConfig(), **values)


# ---------------------------------------------------------------------------
# planning


@dataclass(frozen=True)
class Task:
    stem: str
    run: object = field(compare=False)


def _check(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _order_pairs(alpha: float) -> tuple[tuple[float, float], ...]:
    pairs = tuple(p for p in ((1.0, 2.0), (0.7, 1.3)) if min(p) > alpha)
    return pairs or ((alpha + 0.5, alpha + 1.5),)


def plan(cfg: RunConfig) -> list[Task]:
    """Validate every precondition and return the suite calls in declaration order."""
    _check(len(cfg.suites) > 0, "no suites requested")
    for s in cfg.suites:
        _check(s in SUITES, f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    _check(cfg.grid_n >= 16 and cfg.grid_n % 2 == 0, "grid_n must be an even integer >= 16")
    _check(cfg.period > 0, "period must be positive")
    _check(cfg.dimension == 1, "only dimension 1 is supported")
    _check(cfg.time_points >= 2, "time_points must be >= 2")
    _check(cfg.tolerance_scale > 0, "tolerance_scale must be positive")
    _check(len(cfg.alphas) > 0 and all(0 < a < 1 for a in cfg.alphas), "every alpha must lie in (0, 1)")
    _check(len(cfg.betas) > 0 and all(b > 0 for b in cfg.betas), "every beta must be positive")
    _check(cfg.sigma > 0, "sigma must be positive")
    try:
        v = parse_potential(cfg.potential, PeriodicGrid(cfg.grid_n, cfg.period))
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad potential {cfg.potential!r}: {exc}") from exc
    _check(not v.vanishes, "the potential must not vanish identically")

    problem, tol, seed = cfg.problem, cfg.tolerances, cfg.seed
    constant = problem.with_potential(f"constant:{cfg.mu}")
    smooth = f"random_smooth:seed={seed}"
    tasks: list[Task] = []
    for suite in dict.fromkeys(cfg.suites):
        if suite == "oracles":
            tasks.append(Task(suite, partial(verify_oracles, problem, 10, seed, tol)))
        elif suite == "critical_radius":
            tasks.append(Task(suite, partial(verify_critical_radius, problem, cfg.mu, tol=tol)))
        elif suite == "thm12":
            for a in cfg.alphas:
                _check(a + cfg.sigma < 1 or cfg.sigma < a, f"thm12 needs alpha + sigma < 1 or sigma < alpha (alpha={a:g})")
                fam = (f"holder_cusp:alpha={a}", smooth)
                tasks.append(Task(f"thm12_alpha{a:g}", partial(verify_thm12, problem, a, cfg.sigma, fam, tol=tol)))
        elif suite == "thm13":
            for a in cfg.alphas:
                _check(all(b > a for b in cfg.betas), f"thm13 needs every beta > alpha (alpha={a:g})")
                tasks.append(Task(f"thm13_alpha{a:g}", partial(verify_thm13, problem, a, cfg.betas, tol=tol)))
        elif suite == "thm14":
            betas = tuple(b for b in cfg.betas if b > 1) or (2.0,)
            tasks.append(Task(suite, partial(verify_thm14, cfg.mu, betas, tol=tol)))
        elif suite == "thm15":
            _check(cfg.period >= 4, "thm15 needs a period of at least 4")
            fam = ("constant", "log_bump", smooth)
            tasks.append(Task(suite, partial(verify_thm15, constant, 1.0, fam, tol=tol)))
        elif suite == "kernels":
            tasks.append(Task(suite, partial(verify_kernel_bounds, problem, beta_list=cfg.betas, tol=tol)))
        elif suite == "reproducing":
            tasks.append(Task(suite, partial(verify_reproducing, problem, cfg.betas, (smooth,), tol=tol)))
        elif suite == "order":
            for a in cfg.alphas:
                tasks.append(
                    Task(f"order_alpha{a:g}", partial(verify_growth_order_independence, problem, a, None, _order_pairs(a), tol=tol))
                )
        elif suite == "zygmund":
            for a in cfg.alphas:
                tasks.append(Task(f"zygmund_alpha{a:g}", partial(verify_zygmund_equivalence, constant, a, None, 2.0, tol=tol)))
        elif suite == "lemma21":
            for a in cfg.alphas:
                beta = next((b for b in cfg.betas if b > a), a + 1.0)
                tasks.append(Task(f"lemma21_alpha{a:g}", partial(verify_growth_lemma21, problem, a, None, beta, tol=tol)))
    return tasks


# ---------------------------------------------------------------------------
# output


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(out: Path, stem: str, cfg: RunConfig, report: VerdictReport) -> list[Path]:
    written = []
    payload = {"schema_version": SCHEMA_VERSION, "config": cfg.as_dict(), "report": report.to_dict()}
    path = out / f"{stem}.json"
    path.write_text(_dumps(payload))
    written.append(path)
    for curve in report.curves:
        path = out / f"{stem}_{curve.name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(curve.columns)
            w.writerows([repr(float(x)) for x in row] for row in curve.rows)
        written.append(path)
    return written


def _threads() -> int:
    raw = os.environ.get("SCHCALC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        tasks = plan(cfg)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        with ThreadPoolExecutor(max_workers=min(_threads(), len(tasks))) as pool:
            reports = list(pool.map(lambda t: t.run(), tasks))
    except OracleMismatchError as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE_FAILED
    status = EXIT_OK
    for task, report in zip(tasks, reports):
        write_report(out, task.stem, cfg, report)
        verdict = "PASS" if report.passed else "FAIL"
        print(f"{verdict} {task.stem} ({len(report.records)} checks, {len(report.failures())} failed)", file=stream)
        for r in report.failures():
            print(f"    {r.quantity}: {r.value:.6g} ({r.relation} {r.tolerance:g})", file=stream)
        if report.oracle_failed:
            status = EXIT_ORACLE_FAILED
        elif not report.passed and status == EXIT_OK:
            status = EXIT_SUITE_FAILED
    return status


def describe(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        tasks = plan(cfg)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    plan_text = {
        "config": cfg.as_dict(),
        "out": cfg.out,
        "threads": _threads(),
        "tolerances": asdict(cfg.tolerances),
        "reports": [t.stem for t in tasks],
    }
    stream.write(_dumps(plan_text))
    return EXIT_OK


def spectrum(cfg: RunConfig, stream=None) -> int:
    """Write the eigenvalue table of the configured operator to ``spectrum.csv``."""
    stream = stream or sys.stdout
    try:
        _check(cfg.grid_n >= 16 and cfg.grid_n % 2 == 0, "grid_n must be an even integer >= 16")
        _check(cfg.period > 0, "period must be positive")
        grid = PeriodicGrid(cfg.grid_n, cfg.period)
        v = parse_potential(cfg.potential, grid)
    except (ValueError, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    lam = decompose(grid, v).eigenvalues
    columns = ["index", "eigenvalue"]
    closed = None
    if v.is_constant:
        k = np.arange(grid.n_points)
        closed = np.sort(4.0 / grid.spacing**2 * np.sin(np.pi * k / grid.n_points) ** 2 + float(v.samples[0]))
        columns.append("closed_form")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "spectrum.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for i, value in enumerate(lam):
            row = [i, repr(float(value))]
            if closed is not None:
                row.append(repr(float(closed[i])))
            w.writerow(row)
    print(path, file=stream)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    command = {"run": run, "describe": describe, "spectrum": spectrum}[args.command]
    return command(cfg)


if __name__ == "__main__":
    sys.exit(main())
