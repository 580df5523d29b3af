import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qpo.disc import (AnalyticFunctionModel, DiscGrid, canonical_product_model, closed_form,
                      default_n_theta, disc_orders, gap_series_from_profile,
                      integral_mean_p, log_max_modulus, max_modulus, max_term_log,
                      mean_orders, power_series, radius_rows)
from qpo.errors import ConfigurationError, DomainError, ParameterError


def test_n_theta_rule():
    assert default_n_theta(0.0) == 64
    assert default_n_theta(0.999) == 8192
    assert default_n_theta(1 - 1e-9) == 2 ** 20


def test_max_modulus_examples():
    assert max_modulus(closed_form("monomial", k=1), 0.5) == pytest.approx(0.5, rel=1e-14)
    assert max_modulus(closed_form("constant", value=3.0), 0.7) == pytest.approx(3.0)
    f = closed_form("exp_pole", c=1.0, a=1.0)
    assert log_max_modulus(f, 0.9) == pytest.approx(10.0, rel=1e-12)
    # dense angular oracle
    th = np.linspace(-np.pi, np.pi, 200_001)
    dense = np.max(np.real(1 / (1 - 0.9 * np.exp(1j * th))))
    assert log_max_modulus(f, 0.9) >= dense - 1e-12


def test_max_modulus_overflow_returns_inf():
    f = closed_form("exp_pole", c=1.0, a=2.0)
    assert max_modulus(f, 0.999) == math.inf
    assert log_max_modulus(f, 0.999) == pytest.approx(1e6, rel=1e-10)


def test_off_axis_maximum_is_refined():
    # |f| peaks at theta = 1.234, between grid angles
    f = closed_form("exp_pole", c=1.0, a=1.0)
    rot = AnalyticFunctionModel("closed_form", {"expr": "polynomial",
                                                "coeffs": (1.0, -0.9 * np.exp(-1.234j))})
    lm = log_max_modulus(rot, 0.95, n_theta=64)
    th = np.linspace(0, 2 * np.pi, 400_001)
    dense = np.max(np.log(np.abs(1 - 0.9 * 0.95 * np.exp(1j * (th - 1.234)))))
    assert lm == pytest.approx(dense, abs=1e-9)


def test_n_theta_floor():
    with pytest.raises(ConfigurationError):
        log_max_modulus(closed_form("monomial"), 0.5, n_theta=16)


def test_disc_orders_examples():
    g = DiscGrid.log_uniform(10, 1e4, 20)
    s, i = disc_orders(closed_form("exp_pole", c=1.0, a=1.0), g)
    assert s == pytest.approx(1.0, abs=0.05) and i == pytest.approx(1.0, abs=0.05)
    s, _ = disc_orders(closed_form("exp_pole", c=1.0, a=2.0), g)
    assert s == pytest.approx(2.0, abs=0.05)
    # bounded by e: log+ log+ M vanishes identically
    assert disc_orders(closed_form("polynomial", coeffs=(0.5, 1.0)), g) == (0.0, 0.0)


def test_bounded_function_estimate_decays():
    g = DiscGrid.log_uniform(10, 1e4, 20)
    s, _ = disc_orders(closed_form("polynomial", coeffs=(1.0, 2.0, 3.0)), g)
    x_tail = 0.5 * (math.log(10) + math.log(1e4))
    assert 0 < s <= math.log(math.log(6.0)) / x_tail + 1e-12


def test_integral_mean_examples():
    e = closed_form("constant", value=math.e)
    for p in (1, 2, 3.5):
        assert integral_mean_p(e, 0.7, p) == pytest.approx(1.0, rel=1e-14)
        assert integral_mean_p(closed_form("monomial"), 0.5, p) == pytest.approx(math.log(2))
    cay = closed_form("exp_cayley", c=1.0)
    assert integral_mean_p(cay, 0.9, 1) == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(ParameterError):
        integral_mean_p(e, 0.5, 0.5)


def test_integral_mean_quadrature_oracle():
    f = closed_form("exp_pole", c=1.0, a=2.0)
    r, p = 0.8, 2

    def g(th):
        return abs(np.real((1 - r * np.exp(1j * th)) ** -2.0)) ** p

    ref = (quad(g, -np.pi, np.pi, limit=400, epsabs=1e-13)[0] / (2 * np.pi)) ** (1 / p)
    assert integral_mean_p(f, r, p) == pytest.approx(ref, rel=1e-6)


def test_zero_on_circle_is_perturbed():
    f = canonical_product_model([0.5], 1)
    v = integral_mean_p(f, 0.5, 1, n_theta=64)
    assert np.isfinite(v)


def test_mean_orders_constant_e():
    assert mean_orders(closed_form("constant", value=math.e), 1,
                       DiscGrid.log_uniform(10, 1e3, 10)) == (0.0, 0.0)


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.05, 0.95), c=st.floats(0.1, 3.0))
def test_power_mean_monotone_in_p(r, c):
    f = closed_form("exp_pole", c=c, a=1.5)
    v = [integral_mean_p(f, r, p) for p in (1, 2, 4)]
    assert v[0] <= v[1] * (1 + 1e-6) and v[1] <= v[2] * (1 + 1e-6)


def test_power_series_exact_phases_match_direct_sum():
    n = np.array([0, 3, 17, 1000, 123457])
    la = np.array([0.0, 1.0, -0.5, 2.0, -3.0])
    ph = np.array([0.0, 0.3, 1.0, -2.0, 0.5])
    f = power_series(n, la, ph)
    r, N = 0.99995, 128
    z = r * np.exp(2j * np.pi * np.arange(N) / N)
    direct = np.log(np.abs(sum(np.exp(l + 1j * p) * z ** k for k, l, p in zip(n, la, ph))))
    np.testing.assert_allclose(f.log_abs_circle(r, N), direct, atol=1e-8)
    np.testing.assert_allclose(f.log_abs(z), direct, atol=1e-8)


def test_positive_series_max_is_on_axis():
    f = power_series([0, 2, 5], [0.0, 1.0, 2.0])
    r = 0.6
    assert log_max_modulus(f, r) == pytest.approx(math.log(1 + math.e * r ** 2 + math.e ** 2 * r ** 5))


def test_domain_checks():
    f = closed_form("monomial", r_max=0.9)
    with pytest.raises(DomainError):
        f.log_abs(np.array([0.95]))
    with pytest.raises(ParameterError):
        AnalyticFunctionModel("mystery", {})


def test_model_json_roundtrip():
    for f in (power_series([0, 4, 9], [0.0, 1.5, -2.0], [0, 1, 2]),
              closed_form("exp_pole", c=2.0, a=1.5),
              canonical_product_model([0.5, 0.3j], 2)):
        g = AnalyticFunctionModel.from_json(f.to_json())
        z = np.array([0.1 + 0.2j, -0.4, 0.6j])
        np.testing.assert_allclose(g.log_abs(z), f.log_abs(z), rtol=1e-15)


def test_disc_grid():
    g = DiscGrid.dyadic(10)
    np.testing.assert_allclose(g.radii[:3], [0.5, 0.75, 0.875])
    assert g.n_at(0) >= 64
    with pytest.raises(Exception):
        DiscGrid(np.array([0.5, 0.4]))


def test_radius_rows_columns():
    g = DiscGrid.log_uniform(10, 100, 2)
    rows = list(radius_rows(closed_form("exp_cayley"), g, zeros=[0.95]))
    assert set(rows[0]) == {"r", "log_M", "m_1", "m_2", "m_4", "n1"}


def test_gap_series_constant_profile():
    f, rep = gap_series_from_profile(lambda r: np.full(np.shape(r), 2.0), 1e4)
    assert rep.n_terms == 1 and f._n.tolist() == [0] and f._la[0] == pytest.approx(2.0)


def test_gap_series_log_profile_contact():
    B = lambda r: np.log(1 / (1 - np.asarray(r)))
    f, rep = gap_series_from_profile(B, 1e8, t_range=(2, 1e6))
    r = rep.contact_radii
    assert r.size > 10
    np.testing.assert_allclose(max_term_log(f, r), B(r), rtol=0.02)
    # log mu <= B at the sampled radii (400 per decade of 1/(1-r))
    t = np.geomspace(2, 1e6, int(math.ceil(400 * math.log10(5e5))) + 1)
    rr = 1 - 1 / t
    assert np.all(max_term_log(f, rr) <= B(rr) + 1e-9)
    # and between them only by the sampling resolution
    t = np.geomspace(2, 1e6, 777)
    rr = 1 - 1 / t
    assert np.all(max_term_log(f, rr) <= B(rr) * 1.01)


def test_gap_series_counterexample_orders():
    from qpo.growth import build_counterexample
    from qpo.disc import profile_from_growth

    A = build_counterexample(0.3, 0.8, 0.01, T_max=1e9, domain_start=1.0)
    f, rep = gap_series_from_profile(profile_from_growth(A), 1e14, t_range=(2, 1e8))
    s, i = disc_orders(f, DiscGrid.log_uniform(10, 1e7, 20))
    assert s == pytest.approx(0.8, abs=0.1)
    assert i == pytest.approx(0.3, abs=0.1)
    assert rep.dropped_radii.size > 0          # the step profile is not convex
