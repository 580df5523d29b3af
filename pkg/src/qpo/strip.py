"""Curvilinear strips, Warschawski's asymptotic map and sector witnesses.

A proximate order l(t) defines a strip of half-width omega(t) = pi/(2 l(e^t) q)
in the variable t = log r.  The conformal map onto the straight strip
{|Im w| < pi/2} is represented by Warschawski's explicit asymptotic

    W(u + iv) = k + (pi/2) int_0^u dt/omega(t) + i pi v / (2 omega(u)),

without its o(1) correction.  Since (pi/2)/omega(t) = q l(e^t), the real part
is k + q L(r) log r with L the log-average of l, which is what links the strip
to the mean proximate order L.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ParameterError, QuadratureError
from .report import PropertyReport
from .tails import tail_window_stats

QUAD_TOL = 1e-12


def _quad(fn, a, b, points=None, limit=500):
    if b <= a:
        return 0.0
    pts = None
    if points is not None:
        pts = [p for p in points if a < p < b] or None
    val, err = quad(fn, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=limit, points=pts)
    if err > 1e-9 * max(1.0, abs(val)):
        raise QuadratureError("strip quadrature did not converge", achieved=err)
    return val


def oscillating_l(mid, amp):
    """l(t) = mid + amp sin(log log log t), frozen at ``mid`` for t <= e^e."""
    def l(t):
        t = np.asarray(t, dtype=float)
        llt = np.log(np.maximum(np.log(np.maximum(t, math.e)), math.e))
        out = mid + amp * np.sin(np.log(llt))
        return out if out.ndim else float(out)
    return l


def constant_l(c):
    def l(t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, float(c))
        return out if out.ndim else float(out)
    return l


@dataclass(frozen=True)
class ProximateOrderFunction:
    """A sampled (quasi or generalized) proximate order l on [1, T_max]."""

    l: object
    T_max: float
    l1: float
    l2: float
    derivative_witness: float

    def __call__(self, t):
        return self.l(t)

    @classmethod
    def from_callable(cls, l, T_max, per_decade=200, windows=32):
        """Tail inf/sup and sup |l'(t)| t log t (finite differences in log log t)."""
        t = np.geomspace(math.e, T_max, max(100, int(per_decade * math.log10(T_max / math.e))))
        v = np.asarray(l(t), dtype=float)
        st = tail_window_stats(np.log(t), v, windows=windows)
        s = np.log(np.log(t))
        w = float(np.max(np.abs(np.diff(v) / np.diff(s))))
        if not (0 < st.inf <= st.sup < math.inf) or not math.isfinite(w):
            raise ParameterError("l must satisfy 0 < l1 <= l2 < inf with a finite witness")
        return cls(l, float(T_max), st.inf, st.sup, w)


def mean_proximate_order_L(l, r, points=None):
    """L(r) = int_1^r l(s)/s ds / log r, integrated in u = log s.

    ``points`` lists breakpoints of l (in s) to help the quadrature.
    """
    if r <= 1:
        raise DomainError("need r > 1")
    lr = math.log(r)
    upts = None if points is None else [math.log(p) for p in points if p > 1]
    return _quad(lambda u: float(l(math.exp(u))), 0.0, lr, points=upts) / lr


# --------------------------------------------------------------------------
# strip profiles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StripProfile:
    omega: object
    q: float
    warschawski_constant_k: float = 0.0
    l: object = None
    flags: tuple = field(default=())

    @classmethod
    def constant(cls, omega, k=0.0):
        w = float(omega)
        if w <= 0:
            raise ParameterError("omega must be positive")
        return cls(lambda t: w, q=0.5, warschawski_constant_k=k,
                   l=constant_l(math.pi / (2 * w * 0.5)))

    def with_k(self, k):
        return StripProfile(self.omega, self.q, float(k), self.l, self.flags)


def omega_from_l(l, q, T_max=1e12, check_windows=8):
    """Profile with omega(t) = pi/(2 l(e^t) q).

    Integrability of (omega')^2/omega is checked on the sampled range: the
    partial integrals over doubling windows in t must have shrinking
    increments; otherwise the profile is flagged.
    """
    if not 0 < q < 1:
        raise ParameterError("need 0 < q < 1")

    def omega(t):
        return math.pi / (2.0 * float(l(math.exp(t))) * q)

    flags = []
    tmax = math.log(T_max)
    t = np.linspace(0.0, tmax, 20001)
    w = np.array([omega(x) for x in t])
    if np.any(w <= 0):
        raise ParameterError("omega must be positive")
    dw = np.gradient(w, t)
    g = dw ** 2 / w
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))])
    edges = tmax * 2.0 ** -np.arange(check_windows)[::-1]
    parts = np.interp(edges, t, cum)
    inc = np.diff(parts)
    if inc.size >= 2 and inc[-1] > max(inc[-2], 1e-12 * max(1.0, parts[-1])) * 1.0001:
        flags.append("integrability check failed")
    return StripProfile(omega, q, 0.0, l, tuple(flags))


def omega_integral_tail(profile: StripProfile, T_max=1e12, n=20001):
    """Partial integrals of (omega')^2/omega on [0, t] at doubling t."""
    tmax = math.log(T_max)
    t = np.linspace(0.0, tmax, n)
    w = np.array([profile.omega(x) for x in t])
    g = np.gradient(w, t) ** 2 / w
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))])
    edges = tmax * 2.0 ** -np.arange(8)[::-1]
    return edges, np.interp(edges, t, cum)


def warschawski_map(profile: StripProfile, u, v):
    """k + (pi/2) int_0^u dt/omega(t) + i pi v/(2 omega(u))."""
    wu = profile.omega(u)
    if abs(v) > wu * (1 + 1e-12):
        raise DomainError("|v| exceeds the strip half-width omega(u)")
    re = profile.warschawski_constant_k + (math.pi / 2) * _quad(
        lambda t: 1.0 / profile.omega(t), 0.0, u) if u > 0 else profile.warschawski_constant_k
    return complex(re, math.pi * v / (2 * wu))


def sector_modulus_relation(profile: StripProfile, alpha, r, theta):
    """(|exp(W(log r, theta)/(alpha q))|^alpha, r^{L(r)} e^{k/q})."""
    if r <= 1:
        raise DomainError("need r > 1")
    u = math.log(r)
    lr = float(profile.l(r))
    if abs(theta) > math.pi / (2 * lr * profile.q) * (1 + 1e-12):
        raise DomainError("theta outside the sector |theta| <= pi/(2 l(r) q)")
    W = warschawski_map(profile, u, theta)
    lhs = math.exp(W.real / profile.q)
    L = mean_proximate_order_L(profile.l, r)
    rhs = math.exp(L * u + profile.warschawski_constant_k / profile.q)
    return lhs, rhs


def calibrate_k(profile: StripProfile, r_cal, log_target):
    """Choose k so that log of the relation's left side equals ``log_target`` at r_cal."""
    L = mean_proximate_order_L(profile.l, r_cal)
    return profile.with_k(profile.q * (log_target - L * math.log(r_cal)))


# --------------------------------------------------------------------------
# witnesses
# --------------------------------------------------------------------------

def default_delta(l2, q):
    return math.pi / (4 * l2 * q)


def cartwright_witness(G, l, q, delta=None, r_grid=None, eps=0.2, n_theta=257,
                       l2=None):
    """Sector lower bound log|G(r e^{i theta})| > -r^{l(r)}.

    ``G(w)`` returns log|G(w)| (vectorised over complex w).  The hypothesis
    log|G| < r^{l(r)/(1+eps)} is spot-checked on the full sector
    |theta| <= pi/(2 l(r) q) (boundary included); the conclusion is checked on
    the shrunken sector |theta| <= pi/(2 l(r) q) - delta.
    """
    r = np.asarray(r_grid if r_grid is not None else np.geomspace(10, 1e8, 57), dtype=float)
    if l2 is None:
        l2 = float(np.max(l(r)))
    delta = default_delta(l2, q) if delta is None else float(delta)
    rep = PropertyReport()
    rows, hyp_worst, hyp_at, con_worst, con_at = [], -math.inf, None, -math.inf, None
    for ri in r:
        lr = float(l(ri))
        half = math.pi / (2 * lr * q)
        th = np.linspace(-half, half, n_theta)
        lg = np.asarray(G(ri * np.exp(1j * th)), dtype=float)
        hb = ri ** (lr / (1 + eps))
        h = float(np.max(lg - hb))
        if h > hyp_worst:
            hyp_worst, hyp_at = h, ri
        inner = half - delta
        if inner < 0:
            continue
        th2 = np.linspace(-inner, inner, n_theta)
        lg2 = np.asarray(G(ri * np.exp(1j * th2)), dtype=float)
        bound = -ri ** lr
        m = float(np.min(lg2))
        rows.append((float(ri), m, bound))
        if bound - m > con_worst:
            con_worst, con_at = bound - m, ri
    hyp_ok = hyp_worst < 0
    rep.add("hypothesis", hyp_ok, hyp_worst, 0.0, hyp_at,
            note="max of log|G| - r^(l(r)/(1+eps)) on the sector")
    rep.details["rows"] = rows
    rep.details["delta"] = delta
    if not hyp_ok:
        rep.flags.append("hypothesis unmet")
        rep.add("sector_lower_bound", None, con_worst, 0.0, con_at,
                note="hypothesis unmet; conclusion not judged")
    else:
        rep.add("sector_lower_bound", con_worst < 0, con_worst, 0.0, con_at,
                note="max of -r^l(r) - min log|G| on the shrunken sector")
    return rep


def sector_samples_csv(G, l, q, r_grid, n_theta=33, path=None):
    """CSV rows (r, theta, log_mod_G, bound) over the full sectors."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "theta", "log_mod_G", "bound"])
    for ri in np.asarray(r_grid, dtype=float):
        lr = float(l(ri))
        half = math.pi / (2 * lr * q)
        for th in np.linspace(-half, half, n_theta):
            g = float(np.asarray(G(np.array([ri * np.exp(1j * th)])))[0])
            w.writerow([repr(float(ri)), repr(float(th)), repr(g), repr(-ri ** lr)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def real_part_witness(f, lambda_r, eps, r_grid, n_theta=1024, r0=None):
    """|Re f| < (1-r)^{-(1+eps) lambda(r)} given Re f < (1-r)^{-lambda(r)}.

    ``f`` maps complex z to complex f(z); ``lambda_r`` maps r to lambda(r).
    The report is marked "hypothesis out of range" when the tail infimum of
    lambda is not above 1, and "hypothesis unmet" when the upper bound on
    Re f fails at a sampled point.
    """
    r = np.asarray(r_grid, dtype=float)
    if r0 is not None:
        r = r[r > r0]
    rep = PropertyReport()
    f0 = complex(f(np.array([0j]))[0])
    lam = np.asarray(lambda_r(r), dtype=float)
    lam_inf = float(tail_window_stats(-np.log1p(-r), lam).inf) if r.size > 1 else float(lam.min())
    if abs(f0) > 1e-12:
        rep.flags.append("f(0) != 0")
    if lam_inf <= 1:
        rep.flags.append("hypothesis out of range")
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    hyp, hyp_at, con, con_at, rows = -math.inf, None, -math.inf, None, []
    for ri, li in zip(r, lam):
        re = np.real(f(ri * np.exp(1j * th)))
        lb = -li * math.log1p(-ri)                   # log of (1-r)^{-lambda}
        with np.errstate(divide="ignore"):
            h = float(np.max(re)) - math.exp(lb)
        if h > hyp:
            hyp, hyp_at = h, ri
        mx = float(np.max(np.abs(re)))
        c = mx - math.exp((1 + eps) * lb)
        rows.append((float(ri), mx, math.exp((1 + eps) * lb)))
        if c > con:
            con, con_at = c, ri
    rep.details["rows"] = rows
    hyp_ok = hyp < 0
    rep.add("hypothesis", hyp_ok, hyp, 0.0, hyp_at, note="max of Re f - (1-r)^-lambda")
    judged = hyp_ok and "hypothesis out of range" not in rep.flags and abs(f0) <= 1e-12
    if not hyp_ok:
        rep.flags.append("hypothesis unmet")
    rep.add("real_part_bound", (con < 0) if judged else None, con, 0.0, con_at,
            note="max of |Re f| - (1-r)^-(1+eps)lambda" + ("" if judged else "; not judged"))
    return rep
