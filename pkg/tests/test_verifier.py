import json
import math

import numpy as np
import pytest

from schcalc import verifier as V
from schcalc.calculus import OracleMismatchError, poisson_subordination


BASE = V.Problem()
CONST = V.Problem(potential="constant:1")


def _values(report):
    return {r.quantity: r.value for r in report.records}


def test_problem_helpers():
    assert BASE.refined().n_points == 512
    assert BASE.constant_level is None
    assert CONST.constant_level == 1.0
    assert BASE.with_potential("constant:2").constant_level == 2.0


def test_workspace_is_cached_and_rho_optional():
    assert V.workspace(BASE) is V.workspace(BASE)
    assert V.workspace(V.Problem(n_points=64, potential="constant:0")).rho is None


def test_tolerance_scaling():
    t = V.Tolerances().scaled(2.0)
    assert t.band == 20.0 and t.stability == pytest.approx(0.4)
    assert t.lipschitz_growth == pytest.approx(0.9)
    with pytest.raises(ValueError):
        V.Tolerances().scaled(0.0)


def test_config_hash_is_deterministic():
    assert V.config_hash(BASE, 0.5) == V.config_hash(V.Problem(), 0.5)
    assert V.config_hash(BASE, 0.5) != V.config_hash(BASE, 0.6)
    assert len(V.config_hash(BASE)) == 16


def test_ratio_conventions():
    assert V._ratio(0.0, 0.0) == 1.0
    assert V._ratio(1.0, 0.0) == math.inf
    assert V._ratio(3.0, 2.0) == 1.5


def test_report_serialises_non_finite_values():
    led = V._Ledger("h", V.Tolerances())
    led.at_most("x", math.inf, 1.0)
    led.at_most("y", 0.5, 1.0, mandatory=False)
    rep = V.VerdictReport("s", "h", {"a": (1, 2)}, led.records)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["records"][0]["value"] == "inf"
    assert not rep.passed and [r.quantity for r in rep.failures()] == ["x"]
    assert rep.record("y").passed
    with pytest.raises(KeyError):
        rep.record("z")


def test_zero_stability_counts_as_stable():
    led = V._Ledger("h", V.Tolerances())
    led.stable("zero", 0.0, 0.0)
    assert led.records[0].passed and led.records[0].stability == 1.0


def test_oracles_pass():
    rep = V.verify_oracles(BASE)
    assert rep.passed and not rep.oracle_failed
    assert all(r.kind == "oracle" for r in rep.records)
    assert max(r.value for r in rep.records) <= 1e-5


def test_oracle_mismatch_is_flagged():
    rep = V.verify_oracles(BASE, tol=V.Tolerances().scaled(1e-9))
    assert rep.oracle_failed and not rep.passed
    with pytest.raises(OracleMismatchError):
        ws = V.workspace(BASE)
        poisson_subordination(ws.spec, 1.0, np.ones(BASE.n_points), quad_points=8, validate=True, tol=1e-14)


def test_critical_radius_suite():
    rep = V.verify_critical_radius(BASE)
    assert rep.passed
    vals = _values(rep)
    assert vals["comparability constant c (k0 = 1)"] == pytest.approx(1.357391, rel=1e-5)


def test_operator_ratio_suite():
    rep = V.verify_thm12(BASE, 0.5, 0.3)
    assert rep.passed
    vals = _values(rep)
    assert vals["holder_cusp:alpha=0.5: negative power Hölder ratio"] == pytest.approx(1.075172, rel=1e-5)
    assert vals["holder_cusp:alpha=0.5: positive power Hölder ratio"] == pytest.approx(1.246893, rel=1e-5)


def test_equivalence_frozen_triple():
    rep = V.verify_thm13(BASE, 0.5)
    assert rep.passed
    vals = _values(rep)
    prefix = "holder_cusp:alpha=0.5 beta=1: "
    assert vals[prefix + "Hölder norm"] == pytest.approx(5.703051, rel=1e-5)
    assert vals[prefix + "growth constant c1"] == pytest.approx(1.675934, rel=1e-5)
    assert vals[prefix + "Carleson constant"] == pytest.approx(1.074315, rel=1e-5)
    assert [c.name for c in rep.curves] == ["growth_profile"]


def test_equivalence_scaling_invariance():
    # the equivalence ratios do not change when f is multiplied by a constant
    a = _values(V.verify_thm13(BASE, 0.5, family=["constant:value=1.0"]))
    b = _values(V.verify_thm13(BASE, 0.5, family=["constant:value=7.0"]))
    for key, value in a.items():
        if "/" in key:
            other = key.replace("value=1.0", "value=7.0")
            assert b[other] == pytest.approx(value, rel=1e-9)


def test_equivalence_zero_function():
    rep = V.verify_thm13(BASE, 0.5, beta_list=(1.0,), family=["constant:value=0.0"])
    vals = _values(rep)
    assert all(v == 0.0 or v == 1.0 for v in vals.values())
    assert rep.passed


def test_kernel_suite_and_regime_guard():
    rep = V.verify_kernel_bounds(BASE)
    assert rep.passed
    assert _values(rep)["heat kernel Gaussian envelope constant"] == pytest.approx(2.023077, rel=1e-5)
    with pytest.raises(ValueError):
        V.verify_kernel_bounds(BASE, heat_times=(100.0,))


def test_reproducing_suite():
    rep = V.verify_reproducing(BASE)
    assert rep.passed
    gamma_beta = [r for r in rep.records if "Gamma(beta)" in r.quantity]
    assert gamma_beta and all(not r.mandatory and not r.passed for r in gamma_beta)


def test_order_independence_suite():
    rep = V.verify_growth_order_independence(BASE, 0.5)
    assert rep.passed
    assert _values(rep)["holder_cusp:alpha=0.5: c1(beta=1) / c1(beta=2)"] == pytest.approx(1.070036, rel=1e-5)


def test_zygmund_suite():
    rep = V.verify_zygmund_equivalence(CONST, 1.0)
    assert rep.passed
    with pytest.raises(ValueError):
        V.verify_zygmund_equivalence(BASE, 1.0)


def test_growth_bound_suite():
    rep = V.verify_growth_lemma21(BASE, 0.5)
    assert rep.passed
    assert _values(rep)["constant C (N=2)"] == pytest.approx(4.24426, rel=1e-5)


def test_weierstrass_suite_outcome():
    rep = V.verify_thm14()
    vals = _values(rep)
    assert vals["growth constant c1 (beta=2, alpha=1): max/min - 1 over K"] == pytest.approx(0.26623, rel=1e-4)
    assert vals["second-difference constant: max/min - 1 over K"] == pytest.approx(0.301837, rel=1e-4)
    assert rep.record("Lipschitz constant ratio K=16 / K=8").passed
    assert not rep.passed
    assert [c.name for c in rep.curves] == ["weierstrass_truncations"]


def test_bmo_carleson_suite_outcome():
    rep = V.verify_thm15(CONST)
    assert rep.record("one constant C over the family").passed
    assert rep.record("log_bump: fitted slope c in |F(0, t)| ~ c log(1/t)").passed
    assert not rep.record("log_bump: relative RMS residual of the log fit").passed
    assert not rep.passed
