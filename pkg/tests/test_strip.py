import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpo.errors import DomainError, ParameterError
from qpo.strip import (ProximateOrderFunction, StripProfile, calibrate_k, cartwright_witness,
                       constant_l, mean_proximate_order_L, omega_from_l, omega_integral_tail,
                       oscillating_l, real_part_witness, sector_modulus_relation,
                       sector_samples_csv, warschawski_map)


def test_omega_from_constant_l():
    p = omega_from_l(constant_l(1.0), 0.5)
    assert p.omega(3.0) == pytest.approx(math.pi)
    p = omega_from_l(constant_l(2.0), 0.5)
    assert p.omega(7.0) == pytest.approx(math.pi / 2)
    assert p.flags == ()
    with pytest.raises(ParameterError):
        omega_from_l(constant_l(2.0), 1.0)


def test_omega_integrability_partial_sums_settle():
    p = omega_from_l(oscillating_l(1.5, 0.5), 0.9)
    assert p.flags == ()
    edges, parts = omega_integral_tail(p)
    inc = np.diff(parts)
    assert np.all(inc >= 0)
    # once the oscillation starts (t > e, i.e. log t > 1) increments shrink
    assert inc[-1] < inc[-2] < inc[-3]
    assert inc[-1] < 0.01 * parts[-1]


def test_straight_strip_identity():
    p = StripProfile.constant(math.pi / 2)
    for u in np.linspace(0, 30, 7):
        for v in np.linspace(-math.pi / 2, math.pi / 2, 5):
            assert abs(warschawski_map(p, u, v) - complex(u, v)) < 1e-10


def test_wide_strip_halves():
    p = StripProfile.constant(math.pi)
    assert warschawski_map(p, 8.0, 0.0) == pytest.approx(4.0, abs=1e-10)


def test_map_domain_error():
    with pytest.raises(DomainError):
        warschawski_map(StripProfile.constant(1.0), 1.0, 1.5)


def test_map_conjugate_symmetry():
    p = omega_from_l(oscillating_l(1.5, 0.5), 0.9).with_k(0.7)
    for u in (0.5, 5.0, 20.0):
        w = p.omega(u)
        for v in np.linspace(0, w, 4):
            assert warschawski_map(p, u, -v) == pytest.approx(warschawski_map(p, u, v).conjugate(),
                                                               abs=1e-12)


def test_L_examples():
    assert mean_proximate_order_L(constant_l(1.3), 1e5) == pytest.approx(1.3, rel=1e-12)
    step = lambda s: 2.0 if s <= math.e else 1.0
    assert mean_proximate_order_L(step, math.e ** 2, points=[math.e]) == pytest.approx(1.5, rel=1e-10)
    with pytest.raises(DomainError):
        mean_proximate_order_L(step, 1.0)


def test_L_minus_l_on_final_decade_is_measured():
    # the log-average lags the slowly oscillating l; the gap at 1e11..1e12
    # is about 0.12-0.13 for amplitude 0.5
    l = oscillating_l(1.5, 0.5)
    gaps = [abs(mean_proximate_order_L(l, r) - l(r)) for r in np.logspace(11, 12, 5)]
    assert 0.1 < max(gaps) < 0.15


@settings(max_examples=25, deadline=None)
@given(mid=st.floats(0.5, 3.0), amp=st.floats(0.0, 0.45), r=st.floats(3.0, 1e10))
def test_L_is_running_average(mid, amp, r):
    l = oscillating_l(mid, amp * mid)
    L = mean_proximate_order_L(l, r)
    s = np.geomspace(1.0, r, 4001)
    v = l(s)
    assert v.min() - 1e-9 <= L <= v.max() + 1e-9


def test_modulus_relation_constant_l():
    p = omega_from_l(constant_l(1.4), 0.6)
    for r in (10.0, 1e4):
        for th in (0.0, 0.5):
            lhs, rhs = sector_modulus_relation(p, 1.0, r, th)
            assert lhs == pytest.approx(r ** 1.4, rel=1e-9)
            assert rhs == pytest.approx(r ** 1.4, rel=1e-9)


def test_modulus_relation_theta_invariant_and_ratio_flat():
    l = oscillating_l(1.7, 0.3)
    p = omega_from_l(l, 0.9).with_k(0.4)
    for r in np.logspace(2, 8, 4):
        half = math.pi / (2 * l(r) * 0.9)
        vals = [sector_modulus_relation(p, 1.0, r, th) for th in np.linspace(-half, half, 7)]
        lhs = [v[0] for v in vals]
        assert (max(lhs) - min(lhs)) / max(lhs) < 1e-9
        assert vals[0][0] / vals[0][1] == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(DomainError):
        sector_modulus_relation(p, 1.0, 100.0, 2.0)


def test_calibrate_k():
    l = oscillating_l(1.7, 0.3)
    p = calibrate_k(omega_from_l(l, 0.9), 1e6, 20.0)
    lhs, _ = sector_modulus_relation(p, 1.0, 1e6, 0.0)
    assert math.log(lhs) == pytest.approx(20.0, rel=1e-10)


def test_proximate_order_function():
    po = ProximateOrderFunction.from_callable(oscillating_l(1.7, 0.3), 1e12)
    assert 1.4 <= po.l1 <= po.l2 <= 2.0
    # |l'(t)| t log t = 0.3 |cos(log log log t)| / log log t <= 0.3
    assert 0 < po.derivative_witness <= 0.3 + 1e-6


def _G_power(a):
    return lambda w: -np.real(np.asarray(w, dtype=complex) ** a)


def test_cartwright_passes_for_slow_power():
    l = oscillating_l(1.7, 0.3)
    r = np.geomspace(10, 1e8, 30)
    rep = cartwright_witness(_G_power(1.0), l, 0.9, r_grid=r, eps=0.2)
    assert rep.all_passed and rep["sector_lower_bound"].passed
    assert rep.details["delta"] == pytest.approx(math.pi / (4 * l(r).max() * 0.9), rel=1e-12)


def test_cartwright_trivial_G():
    l = oscillating_l(1.7, 0.3)
    rep = cartwright_witness(lambda w: np.zeros(np.shape(w)), l, 0.9,
                             r_grid=np.geomspace(10, 1e6, 10))
    assert rep["sector_lower_bound"].passed


def test_cartwright_negative_control():
    l = oscillating_l(1.7, 0.3)
    rep = cartwright_witness(_G_power(3.0), l, 0.9, r_grid=np.geomspace(10, 1e8, 30))
    assert "hypothesis unmet" in rep.flags
    assert rep["sector_lower_bound"].passed is None


def test_sector_csv(tmp_path):
    l = oscillating_l(1.7, 0.3)
    text = sector_samples_csv(_G_power(1.0), l, 0.9, [10.0, 100.0], n_theta=5,
                              path=tmp_path / "s.csv")
    lines = text.splitlines()
    assert lines[0] == "r,theta,log_mod_G,bound" and len(lines) == 11
    assert (tmp_path / "s.csv").read_text() == text


R_GRID = 1 - np.geomspace(0.1, 1e-4, 25)


def test_real_part_examples():
    lam = lambda r: np.full(np.shape(r), 1.5)
    rep = real_part_witness(lambda z: (1 - z) ** -1.5 - 1, lam, 0.2, R_GRID)
    assert rep.all_passed and rep["real_part_bound"].passed
    rep = real_part_witness(lambda z: 0 * z, lam, 0.2, R_GRID)
    assert rep["real_part_bound"].passed
    half = lambda r: np.full(np.shape(r), 0.5)
    rep = real_part_witness(lambda z: 1 - (1 - z) ** -0.5, half, 0.2, R_GRID)
    assert "hypothesis out of range" in rep.flags
    assert rep["real_part_bound"].passed is None


def test_real_part_hypothesis_unmet():
    lam = lambda r: np.full(np.shape(r), 1.2)
    rep = real_part_witness(lambda z: (1 - z) ** -2.0 - 1, lam, 0.2, R_GRID)
    assert "hypothesis unmet" in rep.flags
    assert rep["real_part_bound"].passed is None
