import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpo.errors import DomainError
from qpo.sigma import Blend, PiecewiseProximateOrder, Segment, loglog, smooth_corners


def _ll(t):
    return math.log(math.log(t))


def stair(level_hi, level_lo, t1, rho=2.0, a=3.0, b=1e6):
    """constant level_hi on [a, t1], descent with slope -(rho+1), constant level_lo after."""
    u = math.exp(math.exp(_ll(t1) + (level_hi - level_lo) / (rho + 1)))
    segs = (Segment(a, t1, "constant", level_hi, a),
            Segment(t1, u, "loglog_descent", level_hi, t1, -(rho + 1)),
            Segment(u, b, "constant", level_lo, u))
    return PiecewiseProximateOrder(segs, rho=rho, lam=1.0, eta=0.5), u


def test_segment_kinds_and_values():
    s = Segment(10.0, 100.0, "loglog_rise", 1.5, 10.0, 2.0)
    assert s.start_value == pytest.approx(1.5)
    assert s.end_value == pytest.approx(1.5 + 2.0 * (_ll(100) - _ll(10)))
    with pytest.raises(ValueError):
        Segment(1.0, 2.0, "wiggle", 1.0, 1.0)
    with pytest.raises(ValueError):
        Segment(2.0, 1.0, "constant", 1.0, 1.0)


def test_tiling_and_continuity():
    sig, u = stair(2.0, 1.5, 20.0)
    assert sig.check_tiling()
    assert sig.junction_jump() < 1e-12
    assert sig(u) == pytest.approx(1.5, abs=1e-12)
    with pytest.raises(DomainError):
        sig(2.0)


def test_derivative_is_slope_over_t_log_t():
    sig, u = stair(2.0, 1.5, 20.0)
    t = math.sqrt(20.0 * u)
    assert sig.derivative(t)[0] * t * math.log(t) == pytest.approx(-3.0)
    # finite difference oracle
    h = 1e-6 * t
    fd = (sig(t + h) - sig(t - h)) / (2 * h)
    assert sig.derivative(t)[0] == pytest.approx(fd, rel=1e-6)


def test_no_corners_is_unchanged():
    sig = PiecewiseProximateOrder((Segment(3.0, 1e5, "constant", 1.7, 3.0),), 2.0, 1.0, 0.5)
    out = smooth_corners(sig)
    assert out.smoothing == ()
    t = np.geomspace(3, 1e5, 50)
    np.testing.assert_array_equal(out(t), sig(t))


def test_corner_blend_is_monotone_with_flat_ends():
    sig, u = stair(2.0, 1.5, 20.0)
    sm = smooth_corners(sig)
    assert len(sm.smoothing) == 2
    for b in sm.smoothing:
        s = np.linspace(b.s_c - b.h, b.s_c + b.h, 2001)
        v = b.at(s)
        assert np.all(np.diff(v) <= 1e-15)          # non-increasing across the window
        ends = (b.slope(b.s_c - b.h), b.slope(b.s_c + b.h))
        assert ends == pytest.approx((b.m_left, b.m_right), abs=1e-12)
    # the constant sides have zero derivative at the window edges
    first, last = sm.smoothing
    assert first.slope(first.s_c - first.h) == pytest.approx(0.0, abs=1e-12)
    assert last.slope(last.s_c + last.h) == pytest.approx(0.0, abs=1e-12)


def test_blend_matches_cubic_hermite():
    # Hermite data: values and slopes of the adjoining lines at the window edges
    b = Blend(t_corner=50.0, s_c=1.0, h=0.05, m_left=0.0, m_right=-3.0, value=2.0)
    s0, s1 = b.s_c - b.h, b.s_c + b.h
    y0, y1 = b.value - b.m_left * b.h, b.value + b.m_right * b.h
    x = np.linspace(0, 1, 11)
    w = s1 - s0
    h00, h10 = 2 * x**3 - 3 * x**2 + 1, x**3 - 2 * x**2 + x
    h01, h11 = -2 * x**3 + 3 * x**2, x**3 - x**2
    herm = h00 * y0 + h10 * w * b.m_left + h01 * y1 + h11 * w * b.m_right
    np.testing.assert_allclose(b.at(s0 + x * w), herm, atol=1e-14)


def test_smoothing_is_c1():
    sig, _ = stair(2.0, 1.5, 20.0)
    sm = smooth_corners(sig)
    mism, _ = sm.derivative_mismatch()
    assert mism < 1e-6
    raw, _ = sig.derivative_mismatch()
    assert raw > 1e-3


def test_overlapping_windows_are_shrunk_and_flagged():
    sig, _ = stair(2.0, 1.5, 20.0)
    sm = smooth_corners(sig, blend_radius_rule=lambda s, t, l, r: 10.0)
    assert any("overlap" in f for f in sm.flags)
    b0, b1 = sm.smoothing
    assert b0.s_c + b0.h <= b1.s_c - b1.h + 1e-12


def test_protected_point_shrinks_concave_corner():
    sig, u = stair(2.0, 1.5, 20.0)
    # a floor just below sigma right at the first (concave) corner
    pt = np.array([20.0 * 1.0001])
    pf = np.array([sig.piecewise(pt[0]) - 1e-6])
    sm = smooth_corners(sig, protect=(pt, pf))
    assert sm(pt[0]) - pf[0] >= 0.5e-6 - 1e-15
    assert any("protected" in f for f in sm.flags)


@settings(max_examples=40, deadline=None)
@given(hi=st.floats(1.6, 3.0), drop=st.floats(0.05, 1.0), t1=st.floats(8.0, 1e4),
       frac=st.floats(1e-3, 0.2))
def test_smoothing_properties(hi, drop, t1, frac):
    rho = hi
    sig, u = stair(hi, hi - drop, t1, rho=rho, b=max(1e7, 10 * t1))
    rule = lambda s, t, l, r: min(frac * min(l, r), 0.1 / math.log(t))
    sm = smooth_corners(sig, blend_radius_rule=rule)
    t = np.geomspace(sig.start, sig.end, 4000)
    t = np.concatenate([t, [math.exp(math.exp(b.s_c + x * b.h)) for b in sm.smoothing
                            for x in np.linspace(-1, 1, 41)]])
    v, p = sm(t), sig.piecewise(t)
    inside = sm._blend_index(loglog(t)) >= 0
    np.testing.assert_array_equal(v[~inside], p[~inside])   # unchanged off windows
    assert np.all(v <= hi + 1e-12) and np.all(v >= hi - drop - 1e-12)
    assert np.max(np.abs(sm.slope_s(t))) <= sig.max_piece_slope() * (1 + 1e-9)
    assert sm.derivative_mismatch()[0] < 1e-6


@settings(max_examples=40, deadline=None)
@given(m1=st.floats(-5, 5), m2=st.floats(-5, 5), h=st.floats(1e-4, 0.5))
def test_blend_stays_within_piece_range(m1, m2, h):
    b = Blend(10.0, 0.0, h, m1, m2, 1.0)
    s = np.linspace(-h, h, 101)
    pieces = np.where(s < 0, 1.0 + m1 * s, 1.0 + m2 * s)
    v = b.at(s)
    assert np.all(v >= pieces.min() - 1e-12) and np.all(v <= pieces.max() + 1e-12)
    # convex corners sit above the corner, concave ones below
    if m2 > m1:
        assert np.all(v >= pieces - 1e-12)
    else:
        assert np.all(v <= pieces + 1e-12)
    sl = b.slope(s)
    assert np.all(sl >= min(m1, m2) - 1e-12) and np.all(sl <= max(m1, m2) + 1e-12)
