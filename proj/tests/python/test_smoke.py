import math

import pytest

import chainrisk as cr

CANONICAL_CFG = """
[model]
m = 1
hacker = exponential rate=1
detect = exponential rate=1
reset = exponential rate=1
[engine]
reps = 4000
[sweep]
t = 0:2:0.5
"""


def canonical(m=1, k=1):
    e = cr.Distribution.exponential(1.0)
    return cr.BlockchainSpec.from_quorum(m, [e] * k, e, e)


def test_closed_forms():
    assert cr.hack_detect_prob(canonical()) == pytest.approx(0.5, abs=1e-9)
    assert cr.mean_functional_time(canonical()) == pytest.approx(2.0, abs=1e-6)
    assert cr.hack_detect_prob(canonical(1, 3)) == pytest.approx(0.75, abs=1e-9)
    assert cr.gamma_sum_cdf(1, 1, 1, 1, 1.0) == pytest.approx(1 - 2 * math.exp(-1))
    assert cr.quorum_m(5, cr.AttackMode.destructive) == 3


def test_monte_carlo_agrees():
    est = cr.estimate_mean_functional_time(canonical(), n_reps=30000, seed=0)
    assert abs(est.mean - 2.0) < 3 * est.std_error
    curve = cr.instantaneous_prob(canonical(), [0.0, 1.0])
    mc = cr.estimate_survival_curve(canonical(), [0.0, 1.0], n_reps=30000)
    assert curve[0] == 1.0 and mc[0].mean == 1.0
    assert abs(curve[1] - mc[1].mean) < 3 * mc[1].std_error


def test_errors_are_typed():
    with pytest.raises(cr.DomainError):
        cr.Distribution.exponential(-1.0)
    with pytest.raises(cr.UnsupportedFamilyError):
        w = cr.Distribution.weibull(1.0, 2.0)
        cr.BlockchainSpec.from_quorum(2, [w], w, w)
    with pytest.raises(cr.ParseError):
        cr.run_command("validate", "[model]\nm = 1\n")


def test_optimize_and_commands():
    econ = cr.EconSpec(cr.RateExpr(0.2), cr.RateExpr(2, 0.2), cr.RateExpr(2, 0.3))
    best, value, curve = cr.optimize_m(canonical(1, 5), econ, 1, 10)
    assert best == max(curve, key=lambda p: p[1])[0]
    body, passed = cr.run_command("validate", CANONICAL_CFG)
    assert passed
    assert body.startswith("quantity,analytic,mc,stderr,z_score,pass\r\n")
    again, _ = cr.run_command("validate", CANONICAL_CFG)
    assert again == body
