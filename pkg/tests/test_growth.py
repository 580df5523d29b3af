import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpo.errors import ConfigurationError, DomainError, ParameterError
from qpo.growth import (GridSpec, GrowthFunction, build_counterexample, closed_form,
                        estimate_orders, eval_growth, from_table, growth_index)


def test_step_values_on_flat_part_and_ramp_end():
    A = build_counterexample(1, 2, 0.01)
    assert eval_growth(A, 3.0) == pytest.approx(4.0, rel=1e-12)
    assert eval_growth(A, 4.0) == pytest.approx(16.0, rel=1e-12)
    assert eval_growth(A, 256.0) == pytest.approx(65536.0, rel=1e-12)


def test_knots():
    A = build_counterexample(1, 2, 0.01)
    np.testing.assert_allclose(A.ramp_knots[:5], [2, 4, 16, 256, 65536], rtol=1e-12)


def test_ramp_is_linear_in_t():
    A = build_counterexample(1, 2, 0.01)
    # last 1% of (4, 16] rises linearly from 16 to 256
    a = 16 - 0.01 * 12
    for w in (0.0, 0.25, 0.5, 1.0):
        t = a + w * (16 - a)
        assert A(t) == pytest.approx(16 + w * 240, rel=1e-12)


def test_constant_table():
    A = from_table([math.e, math.e ** 2], [1.0, 1.0])
    assert eval_growth(A, math.e) == pytest.approx(1.0)
    assert growth_index(A, 5.0) == 0.0


def test_growth_index_examples():
    A = build_counterexample(1, 2, 0.01)
    assert growth_index(A, 4.0) == pytest.approx(2.0, rel=1e-12)
    P = closed_form("power", (math.e, 1e8), c=1.5)
    assert growth_index(P, math.e ** 3) == pytest.approx(1.5, rel=1e-14)


def test_growth_index_below_e_rejected():
    P = closed_form("power", (1.0, 1e8), c=1.5)
    with pytest.raises(DomainError):
        growth_index(P, 2.0)


def test_out_of_domain():
    A = build_counterexample(1, 2, 0.01, T_max=1e4)
    with pytest.raises(DomainError):
        A(2e4)
    with pytest.raises(DomainError):
        A(1.0)


@pytest.mark.parametrize("lam,rho", [(2, 1), (0, 1), (1, 1)])
def test_counterexample_bad_orders(lam, rho):
    with pytest.raises(ParameterError):
        build_counterexample(lam, rho)


def test_two_sided_power_bound():
    A = build_counterexample(1, 2, 0.01, T_max=1e8)
    t = np.geomspace(math.e, 1e8, 10_000)
    la = A.log_value(t)
    assert np.all(la > np.log(t))
    assert np.all(la <= 2 * np.log(t) * (1 + 1e-12))


def test_estimate_pure_power():
    P = closed_form("power", (math.e, 1e8), c=2.0)
    est = estimate_orders(P, GridSpec.log_uniform(math.e, 1e8, 50))
    assert est.rho_hat == pytest.approx(2.0, abs=1e-9)
    assert est.lambda_hat == pytest.approx(2.0, abs=1e-9)


def test_estimate_counterexample_against_bruteforce():
    A = build_counterexample(1, 2, 0.01, T_max=1e6)
    est = estimate_orders(A, GridSpec.log_uniform(math.e, 1e6, 200))
    assert 1.9 <= est.rho_hat <= 2.0
    assert 1.0 <= est.lambda_hat <= 1.1
    # brute force over a dense grid of the tail half
    t = np.geomspace(1e3, 1e6, 200_000)
    bp = A.breakpoints()
    t = np.concatenate([t, bp[(bp >= 1e3) & (bp <= 1e6)]])
    d = A.log_value(t) / np.log(t)
    assert est.rho_hat == pytest.approx(d.max(), abs=1e-6)
    assert est.lambda_hat == pytest.approx(d.min(), abs=2e-3)


def test_estimate_oscillating_power_matches_direct_sine():
    # On the tail half in log t the exponent sweeps only a small arc of the
    # sine, so the windowed estimates stay near 1.9-2.0.
    B = closed_form("oscillating_power", (math.e, 1e12), mid=1.5, amp=0.5)
    est = estimate_orders(B, GridSpec.log_uniform(math.e, 1e12, 200))
    cut = 0.5 * (1.0 + math.log(1e12))            # log t at the start of the tail
    lo = 1.5 + 0.5 * math.sin(math.log(math.log(cut)))
    hi = 1.5 + 0.5 * math.sin(math.log(math.log(math.log(1e12))))
    assert est.lambda_hat == pytest.approx(lo, abs=2e-3)
    assert est.rho_hat == pytest.approx(hi, abs=2e-3)
    assert abs(est.rho_hat - 2.0) <= 0.15


def test_estimate_needs_100_points():
    P = closed_form("power", (math.e, 1e8), c=2.0)
    with pytest.raises(ConfigurationError):
        estimate_orders(P, GridSpec.log_uniform(math.e, 1e8, 5))


def test_window_report_rows():
    P = closed_form("power", (math.e, 1e8), c=1.0)
    est = estimate_orders(P, GridSpec.log_uniform(math.e, 1e8, 50))
    assert len(est.window_report) == 32
    ends = [r[0] for r in est.window_report]
    assert ends == sorted(ends)


def test_json_roundtrip():
    for A in (build_counterexample(1, 2, 0.01),
              closed_form("oscillating_power", (math.e, 1e9), mid=1.5, amp=0.5),
              from_table([3.0, 10.0, 100.0], [2.0, 5.0, 50.0])):
        B = GrowthFunction.from_json(A.to_json())
        t = np.geomspace(A.domain_start, A.domain_end, 50)
        np.testing.assert_array_equal(A.log_value(t), B.log_value(t))
        assert set(json.loads(A.to_json())) == {"kind", "params", "domain"}


def test_table_validation():
    with pytest.raises(ParameterError):
        from_table([1, 1], [1, 2])
    with pytest.raises(ParameterError):
        from_table([1, 2], [2, 1])


def test_gridspec_validation():
    with pytest.raises(ConfigurationError):
        GridSpec(np.array([1.0, 1.0, 2.0]), 1)


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(0.2, 3.0), gap=st.floats(0.1, 3.0), frac=st.floats(1e-3, 0.5))
def test_counterexample_monotone(lam, gap, frac):
    A = build_counterexample(lam, lam + gap, frac, T_max=1e12)
    t = np.geomspace(A.domain_start, 1e12, 3000)
    t = np.unique(np.concatenate([t, A.breakpoints()]))
    v = A.log_value(t)
    assert np.all(np.diff(v) >= -1e-12 * np.abs(v[1:]))


@settings(max_examples=30, deadline=None)
@given(c=st.floats(0.0, 10.0))
def test_growth_index_of_power_is_exponent(c):
    P = closed_form("power", (math.e, 1e10), c=c)
    t = np.geomspace(math.e, 1e10, 200)
    np.testing.assert_allclose(growth_index(P, t), c, rtol=1e-12, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(c=st.floats(0.1, 5.0))
def test_estimates_scale_with_power(c):
    t = np.geomspace(3.0, 1e9, 40)
    v = np.exp(np.log(t) * (1.2 + 0.3 * np.sin(np.log(t))) + np.log(t) * 0.4 * np.arange(40) / 40)
    v = np.maximum.accumulate(v)
    A = from_table(t, v)
    Ac = from_table(t, v ** c)
    g = GridSpec.log_uniform(3.0, 1e9, 30)
    e1, ec = estimate_orders(A, g), estimate_orders(Ac, g)
    assert ec.rho_hat == pytest.approx(c * e1.rho_hat, rel=1e-9, abs=1e-9)
    assert ec.lambda_hat == pytest.approx(c * e1.lambda_hat, rel=1e-9, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.0, 3.0), min_size=3, max_size=12))
def test_table_interpolation_monotone(incs):
    t = np.geomspace(math.e, 1e6, len(incs) + 1)
    v = np.exp(np.concatenate([[0.5], 0.5 + np.cumsum(incs)]))
    A = from_table(t, v)
    s = np.geomspace(t[0], t[-1], 2000)
    lv = A.log_value(s)
    assert np.all(np.diff(lv) >= -1e-12 * np.maximum(1, np.abs(lv[1:])))
