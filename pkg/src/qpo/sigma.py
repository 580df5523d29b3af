"""Piecewise quasi proximate orders and their C^1 smoothing.

Every piece produced by the construction is affine in ``s = log log t``:

    sigma(t) = value + slope * (log log t - log log anchor)

(constant pieces have slope 0, stair descents slope -(rho+1), rise connectors
slope C_n).  In the ``s`` variable ``|d sigma / ds| = |sigma'(t)| t log t``,
so the derivative witness of a piece is just ``|slope|``.

Corners are smoothed by a quadratic blend in ``s`` over a symmetric window
(the cubic Hermite interpolant of the two adjoining lines degenerates to this
quadratic); its slope moves linearly from one side to the other, so the
derivative witness never grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError

KINDS = ("constant", "loglog_descent", "loglog_rise")


def loglog(t):
    return np.log(np.log(t))


@dataclass(frozen=True)
class Segment:
    a: float
    b: float
    kind: str
    value: float       # sigma(anchor)
    anchor: float
    slope: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if not self.a <= self.b:
            raise ValueError("segment with a > b")

    def at(self, t):
        if self.slope == 0.0:
            return np.full_like(np.asarray(t, dtype=float), self.value)
        return self.value + self.slope * (loglog(t) - math.log(math.log(self.anchor)))

    @property
    def start_value(self):
        return float(self.at(self.a))

    @property
    def end_value(self):
        return float(self.at(self.b))


@dataclass(frozen=True)
class Blend:
    """Quadratic blend in s around a corner at ``s_c`` with half-width ``h``."""

    t_corner: float
    s_c: float
    h: float
    m_left: float
    m_right: float
    value: float       # piecewise-affine value at the corner

    @property
    def convex(self):
        return self.m_right > self.m_left

    def at(self, s):
        x = s - self.s_c
        return (self.value + 0.5 * (self.m_left + self.m_right) * x
                + (self.m_right - self.m_left) * (x * x + self.h * self.h) / (4 * self.h))

    def slope(self, s):
        x = s - self.s_c
        return 0.5 * (self.m_left + self.m_right) + (self.m_right - self.m_left) * x / (2 * self.h)


@dataclass(frozen=True)
class PiecewiseProximateOrder:
    segments: tuple
    rho: float
    lam: float
    eta: float
    smoothing: tuple = ()
    flags: tuple = field(default=())

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("sigma needs at least one segment")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_starts", np.array([s.a for s in segs]))
        bl = tuple(sorted(self.smoothing, key=lambda b: b.s_c))
        object.__setattr__(self, "smoothing", bl)
        object.__setattr__(self, "_bl_lo", np.array([b.s_c - b.h for b in bl]))
        object.__setattr__(self, "_bl_hi", np.array([b.s_c + b.h for b in bl]))

    @property
    def start(self):
        return self.segments[0].a

    @property
    def end(self):
        return self.segments[-1].b

    def _seg_index(self, t):
        return np.clip(np.searchsorted(self._starts, t, side="right") - 1,
                       0, len(self.segments) - 1)

    def _blend_index(self, s):
        if not self.smoothing:
            return np.full(s.shape, -1)
        i = np.clip(np.searchsorted(self._bl_lo, s, side="right") - 1, 0, None)
        inside = (s >= self._bl_lo[i]) & (s <= self._bl_hi[i])
        return np.where(inside, i, -1)

    def piecewise(self, t):
        """Value of the unsmoothed piecewise-affine function."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any(t < self.start * (1 - 1e-12)) or np.any(t > self.end * (1 + 1e-12)):
            raise DomainError("t outside the domain of sigma")
        idx = self._seg_index(t)
        vals = np.array([s.value for s in self.segments])[idx]
        slopes = np.array([s.slope for s in self.segments])[idx]
        anchors = np.array([s.anchor for s in self.segments])[idx]
        out = vals + slopes * (loglog(t) - loglog(anchors))
        return float(out[0]) if scalar else out

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.atleast_1d(self.piecewise(t))
        if self.smoothing:
            s = loglog(t)
            bi = self._blend_index(s)
            for k in np.unique(bi[bi >= 0]):
                m = bi == k
                out[m] = self.smoothing[k].at(s[m])
        return float(out[0]) if scalar else out

    def slope_s(self, t):
        """d sigma / d(log log t); equals sigma'(t) t log t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([s.slope for s in self.segments])[self._seg_index(t)]
        if self.smoothing:
            s = loglog(t)
            bi = self._blend_index(s)
            for k in np.unique(bi[bi >= 0]):
                m = bi == k
                out[m] = self.smoothing[k].slope(s[m])
        return out

    def derivative(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.slope_s(t) / (t * np.log(t))

    # -- diagnostics ----------------------------------------------------------

    def corners(self):
        """(t, left slope, right slope) for each junction with a slope change."""
        out = []
        for L, R in zip(self.segments[:-1], self.segments[1:]):
            if L.slope != R.slope:
                out.append((R.a, L.slope, R.slope))
        return out

    def junction_jump(self):
        """Largest absolute value jump at segment junctions."""
        jumps = [abs(L.end_value - R.start_value)
                 for L, R in zip(self.segments[:-1], self.segments[1:])]
        return max(jumps, default=0.0)

    def derivative_mismatch(self):
        """Largest one-sided mismatch of sigma'(t) over all junctions.

        Junctions are blend-window edges and corners left unsmoothed.
        """
        worst, where = 0.0, None
        smoothed = {b.t_corner for b in self.smoothing}
        for t, m1, m2 in self.corners():
            if t in smoothed:
                continue
            gap = abs(m1 - m2) / (t * math.log(t))
            if gap > worst:
                worst, where = gap, t
        for b in self.smoothing:
            for edge, m_line in ((b.s_c - b.h, b.m_left), (b.s_c + b.h, b.m_right)):
                t = math.exp(math.exp(edge))
                gap = abs(b.slope(edge) - m_line) / (t * math.log(t))
                if gap > worst:
                    worst, where = gap, t
        return worst, where

    def max_piece_slope(self):
        return max(abs(s.slope) for s in self.segments)

    def check_tiling(self, tol=1e-9):
        """Segments partition [start, end] with continuity at junctions."""
        for L, R in zip(self.segments[:-1], self.segments[1:]):
            if abs(L.b - R.a) > 1e-12 * max(1.0, R.a):
                return False
        return self.junction_jump() <= tol


# --------------------------------------------------------------------------
# smoothing
# --------------------------------------------------------------------------

def default_radius(s_c, t_c, left_len, right_len, fraction=0.01, max_logt=0.1):
    """Half-width in s: ``fraction`` of the shorter adjoining piece, capped at
    ``max_logt`` in log t."""
    return min(fraction * min(left_len, right_len), max_logt / math.log(t_c))


def smooth_corners(sigma: PiecewiseProximateOrder, blend_radius_rule=None,
                   protect=None):
    """Replace every corner of ``sigma`` by a C^1 quadratic blend in log log t.

    Parameters
    ----------
    blend_radius_rule : callable, optional
        ``rule(s_c, t_c, left_len, right_len) -> h`` giving the half-width in
        ``s = log log t``.  Defaults to :func:`default_radius`.
    protect : (t, floor) arrays, optional
        Points where sigma must stay at or above ``floor``.  Blends at concave
        corners dip below the piecewise function; their windows are shrunk
        until each protected point keeps at least half of its margin.

    Windows that would overlap are shrunk to meet halfway; both adjustments are
    recorded in ``flags`` of the result.
    """
    rule = blend_radius_rule or default_radius
    segs = sigma.segments
    flags = list(sigma.flags)
    pt, pf = (None, None)
    if protect is not None:
        pt = np.asarray(protect[0], dtype=float)
        pf = np.asarray(protect[1], dtype=float)
        order = np.argsort(pt)
        pt, pf = pt[order], pf[order]
        ps = loglog(pt)
        p_pl = sigma.piecewise(pt)

    raw = []
    for i in range(len(segs) - 1):
        L, R = segs[i], segs[i + 1]
        if L.slope == R.slope:
            continue
        t_c = R.a
        s_c = math.log(math.log(t_c))
        left_len = s_c - math.log(math.log(L.a))
        right_len = math.log(math.log(R.b)) - s_c
        h = rule(s_c, t_c, left_len, right_len)
        raw.append([t_c, s_c, h, L.slope, R.slope, L.end_value])

    # overlapping windows meet halfway
    for j in range(len(raw) - 1):
        gap = raw[j + 1][1] - raw[j][1]
        if raw[j][2] + raw[j + 1][2] > gap:
            raw[j][2] = min(raw[j][2], gap / 2)
            raw[j + 1][2] = min(raw[j + 1][2], gap / 2)
            flags.append(f"blend window shrunk (overlap) at t={raw[j][0]:.6g}")

    blends = []
    for t_c, s_c, h, m1, m2, val in raw:
        if h <= 0:
            flags.append(f"corner left unsmoothed at t={t_c:.6g}")
            continue
        if m2 < m1 and pt is not None:
            h0 = h
            lo, hi = np.searchsorted(ps, [s_c - h, s_c + h])
            near_s, near_f, near_pl = ps[lo:hi], pf[lo:hi], p_pl[lo:hi]
            for _ in range(200):
                b = Blend(t_c, s_c, h, m1, m2, val)
                inside = np.abs(near_s - s_c) < h
                if not inside.any():
                    break
                q = b.at(near_s[inside])
                margin = near_pl[inside] - near_f[inside]
                if np.all(q - near_f[inside] >= 0.5 * margin) and np.all(margin > 0):
                    break
                h *= 0.5
            else:
                h = 0.0
            if h <= 0 or h < 1e-300:
                flags.append(f"corner left unsmoothed at t={t_c:.6g}")
                continue
            if h < h0:
                flags.append(f"blend window shrunk (protected point) at t={t_c:.6g}")
        blends.append(Blend(t_c, s_c, h, m1, m2, val))
    return replace(sigma, smoothing=tuple(blends), flags=tuple(flags))
