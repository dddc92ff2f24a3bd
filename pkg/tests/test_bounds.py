import math

import pytest

from poolcount.bounds import BOUND_NAMES, BoundQuery, BoundValue, evaluate, log_star


def test_log_star_values():
    assert log_star(0) == 1
    assert log_star(1) == 1
    assert log_star(2) == 1
    assert log_star(3) == 2
    assert log_star(4) == 2
    assert log_star(5) == 3
    assert log_star(16) == 3
    assert log_star(65536) == 4
    assert log_star(2**20) == 5
    assert log_star(2.0**1000) == 5
    with pytest.raises(ValueError):
        log_star(-1)


def test_det_lower_frozen_point():
    assert evaluate(BoundQuery("det_lower", n=1024, d=1, epsilon=0.0)).value == 10.0


def test_det_bounds_formula():
    got = evaluate(BoundQuery("det_upper", n=1024, d=50, epsilon=0.5))
    assert got.value == pytest.approx(50 * math.log2(512 / 50))
    assert not got.clamped


def test_det_bound_clamps_tiny_log():
    # (1-eps)n/d below 2 gets raised to 2 so the bound stays positive
    got = evaluate(BoundQuery("det_lower", n=8, d=3, epsilon=0.5))
    assert got.clamped
    assert got.value == 3.0


def test_mc_lower_loglog_frozen_point():
    got = evaluate(BoundQuery("mc_lower_loglog", d=65536))
    assert got.value == 3.0
    assert not got.clamped


def test_clamping_flagged_for_tiny_d():
    for name in ("mc_lower_loglog", "expected_lower", "expected_lower_refined"):
        for d in (0, 1, 2):
            got = evaluate(BoundQuery(name, n=100, d=d))
            assert got.clamped, (name, d)
            assert math.isfinite(got.value)


def test_expected_lower_values():
    got = evaluate(BoundQuery("expected_lower", d=65536, delta=0.1))
    assert got.value == pytest.approx(0.9 * 4.0)
    refined = evaluate(BoundQuery("expected_lower_refined", d=65536, delta=0.1))
    # loglog = 4, its log = 2, minus the additive 2: zero at this d
    assert refined.value == pytest.approx(0.0)


def test_eps_lower_bound_asymptotic():
    got = evaluate(BoundQuery("mc_lower_eps", epsilon=0.5, delta=0.1))
    assert got.asymptotic
    assert got.value == pytest.approx(2.0 * math.log2(10.0))
    degenerate = evaluate(BoundQuery("mc_lower_eps", epsilon=0.0))
    assert degenerate.value == math.inf


def test_upper_bounds_unit_versus_fitted_constants():
    q = BoundQuery("expected_upper", n=2**20, d=65536, epsilon=0.5, delta=0.1)
    unit = evaluate(q)
    assert unit.asymptotic
    ll = 4.0
    assert unit.value == pytest.approx(
        (1 - 0.1 + 0.1**2) * ll + math.sqrt(ll) + 4.0 * math.log2(10.0)
    )
    fitted = evaluate(q, constants={"c1": 2.0, "c2": 3.0})
    assert not fitted.asymptotic
    assert fitted.value == pytest.approx(
        (1 - 0.1 + 0.1**2) * ll + 2.0 * math.sqrt(ll) + 3.0 * 4.0 * math.log2(10.0)
    )


def test_mc_upper_lead_term_includes_log_star():
    q = BoundQuery("mc_upper", n=2**20, d=65536, epsilon=0.5, delta=0.1)
    got = evaluate(q, constants={"c1": 0.0, "c2": 0.0})
    assert got.value == pytest.approx(log_star(2**20) + 4.0)


def test_stage1_output_range_small_point_fits_a_double():
    got = evaluate(BoundQuery("stage1_output_range", d=1, delta=0.1))
    assert got.asymptotic
    assert got.log2_value is not None
    assert math.isfinite(got.value)
    assert got.value == pytest.approx(2.0**got.log2_value)


def test_stage1_output_range_huge_point_reports_log2():
    got = evaluate(BoundQuery("stage1_output_range", d=2**40, delta=0.01))
    assert got.value == math.inf
    assert got.log2_value is not None and math.isfinite(got.log2_value)


def test_stage1_output_range_monotone_in_d():
    values = [
        evaluate(BoundQuery("stage1_output_range", d=d, delta=0.1)).log2_value
        for d in (1, 10, 100, 10**6)
    ]
    assert values == sorted(values)


def test_every_bound_evaluates_finite_or_flagged():
    for name in BOUND_NAMES:
        for d in (0, 1, 2, 7, 1000):
            got = evaluate(BoundQuery(name, n=2**20, d=d, epsilon=0.5, delta=0.1))
            assert isinstance(got, BoundValue)
            assert math.isfinite(got.value) or got.log2_value is not None


def test_query_validation():
    with pytest.raises(ValueError, match="unknown bound"):
        BoundQuery("not-a-bound")
    with pytest.raises(ValueError):
        BoundQuery("det_lower", n=0)
    with pytest.raises(ValueError):
        BoundQuery("det_lower", d=-1)
    with pytest.raises(ValueError):
        BoundQuery("det_lower", epsilon=1.0)
    with pytest.raises(ValueError):
        BoundQuery("det_lower", delta=0.0)
