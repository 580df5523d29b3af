"""Constructive quasi proximate order: sigma and A* from a growth function.

Pipeline (all on a working grid W = log-uniform grid + breakpoints of A +
anchor points):

1. anchors r_n < r_n* < r_n' < r_{n+1} from level crossings of d(t);
2. per cycle the excursion maximum M_n at R_n and the suffix-max envelope D;
3. a staircase on [R_n, r_n*] alternating constants and descents of slope
   -(rho+1) in log log t until the envelope is met;
4. a rise of slope C_n in log log t on [r_n*, r_n'] landing exactly on
   M_{n+1}, then a constant up to R_{n+1};
5. optional C^1 smoothing of the corners.

Everything is deterministic: identical inputs give identical ledgers and
segment lists.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConstructionInfeasible, DomainError, ParameterError
from .growth import E, GridSpec, GrowthFunction, growth_index, sample_points
from .report import PropertyReport
from .sigma import PiecewiseProximateOrder, Segment, loglog, smooth_corners
from .tails import DEFAULT_WINDOWS, tail_window_stats

ROOT_RTOL = 1e-12


# --------------------------------------------------------------------------
# ledger
# --------------------------------------------------------------------------

@dataclass
class SequenceLedger:
    lam: float
    rho: float
    eta: float
    eps: list = field(default_factory=list)
    r: list = field(default_factory=list)
    r_prime: list = field(default_factory=list)
    r_star: list = field(default_factory=list)
    M: list = field(default_factory=list)
    R: list = field(default_factory=list)
    stairs: list = field(default_factory=list)   # per n: [(u_k, u*_k, t_{k+1}), ...]
    C: list = field(default_factory=list)
    tail_level: float | None = None
    truncated: bool = False
    notice: str = ""
    grid: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def depth(self):
        """Number of complete cycles (r_n, r_n*, r_n')."""
        return len(self.r_prime)

    @property
    def eps1(self):
        return self.eps[0]

    def check_invariants(self):
        """List of violated invariants (empty when all hold)."""
        bad = []
        lo, hi = self.lam + self.eta / 2, self.lam + self.eta
        for n in range(self.depth):
            chain = [self.r[n], self.r_star[n], self.r_prime[n]]
            if n + 1 < len(self.r):
                chain.append(self.r[n + 1])
            if any(b <= a for a, b in zip(chain, chain[1:])):
                bad.append(f"interleaving fails at n={n + 1}")
            lhs = hi * math.log(self.r_star[n])
            rhs = lo * math.log(self.r_prime[n])
            if abs(lhs - rhs) > 1e-10 * abs(rhs):
                bad.append(f"anchor relation fails at n={n + 1}")
        if any(b >= a for a, b in zip(self.eps, self.eps[1:])) or min(self.eps) <= 0:
            bad.append("eps not strictly decreasing and positive")
        for n in range(1, len(self.M)):
            if not (self.rho - self.eps[n] - 1e-12 <= self.M[n] <= self.rho + self.eps[0] + 1e-12):
                bad.append(f"M_{n + 1}={self.M[n]:.6g} outside [rho-eps_n, rho+eps_1]")
        return bad

    def to_dict(self):
        return {
            "lambda": self.lam, "rho": self.rho, "eta": self.eta,
            "eps": list(self.eps), "r": list(self.r), "r_prime": list(self.r_prime),
            "r_star": list(self.r_star), "M": list(self.M), "R": list(self.R),
            "stairs": [[list(s) for s in st] for st in self.stairs],
            "C": list(self.C), "tail_level": self.tail_level,
            "truncated": self.truncated, "notice": self.notice,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class EnvelopeSampler:
    """D(t) = max(sup of d over [t, r_n*] on the grid, lambda + eta).

    Stored as a suffix maximum over the grid points of [R_n, r_n*]; off the
    grid D(t) takes the value at the first grid point >= t, which keeps D
    nonincreasing and left-continuous.
    """

    t: np.ndarray
    D: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.t[0] * (1 - 1e-12)) or np.any(x > self.t[-1] * (1 + 1e-12)):
            raise DomainError("t outside the envelope interval")
        i = np.clip(np.searchsorted(self.t, x * (1 - 1e-15), side="left"), 0, self.t.size - 1)
        out = self.D[i]
        return out if out.ndim else float(out)

    @property
    def start(self):
        return float(self.t[0])

    @property
    def end(self):
        return float(self.t[-1])


# --------------------------------------------------------------------------
# anchors
# --------------------------------------------------------------------------

def _default_eps_rule(eps1):
    return lambda n: eps1 * 2.0 ** (1 - n)


def _validate(rho, lam, eta, eps1):
    if not (0 <= lam < rho < math.inf):
        raise ParameterError("need 0 <= lambda < rho < inf")
    if not (0 < eta < rho - lam):
        raise ParameterError("need 0 < eta < rho - lambda")
    if eps1 is None:
        eps1 = min(1.0, eta) / 2
    if not (0 < eps1 < min(1.0, eta)):
        raise ParameterError("need 0 < eps_1 < min(1, eta)")
    return eps1


def _working_grid(A, grid, T_max):
    if T_max is None:
        T_max = A.domain_end if grid is None else float(np.asarray(getattr(grid, "points", grid))[-1])
    if T_max > A.domain_end * (1 + 1e-12):
        raise DomainError("T_max beyond the domain of A")
    start = max(A.domain_start, E)
    if grid is None:
        grid = GridSpec.log_uniform(start, T_max, 200)
    elif not isinstance(grid, GridSpec):
        grid = GridSpec(np.asarray(grid, dtype=float), 0)
    t = sample_points(A, grid)
    t = t[(t >= start * (1 - 1e-15)) & (t <= T_max * (1 + 1e-15))]
    return t, float(T_max)


def _d(A, t):
    return growth_index(A, t)


def _crossing(A, tg, dg, level, start, direction):
    """First t >= start where d meets ``level``.

    ``direction="up"``: first t with d(t) >= level (returns start if already);
    ``direction="down"``: first strict down-crossing after start.
    Bracketed on the grid, refined with Brent's method.
    """
    i0 = np.searchsorted(tg, start, side="right")
    x = np.concatenate([[start], tg[i0:]])
    f = np.concatenate([[_d(A, start)], dg[i0:]]) - level
    if direction == "up":
        if f[0] >= 0:
            return float(start)
        hit = np.nonzero(f[1:] >= 0)[0]
    else:
        hit = np.nonzero((f[:-1] > 0) & (f[1:] <= 0))[0]
    if hit.size == 0:
        return None
    j = hit[0] + 1
    a, b = float(x[j - 1]), float(x[j])
    if f[j] == 0:
        return b
    return brentq(lambda s: _d(A, s) - level, a, b, xtol=1e-300, rtol=ROOT_RTOL)


def _anchors(A, tg, dg, rho, lam, eta, eps1, eps_rule, depth):
    lo = lam + eta / 2
    ratio = lo / (lam + eta)
    led = SequenceLedger(lam=lam, rho=rho, eta=eta)
    led.eps.append(eps1)
    r1 = _crossing(A, tg, dg, rho - eps1, tg[0], "up")
    if r1 is None:
        raise ConstructionInfeasible("d never reaches rho - eps_1 below T_max")
    led.r.append(r1)
    while depth is None or led.depth < depth:
        rn = led.r[-1]
        x = rn
        while True:
            rp = _crossing(A, tg, dg, lo, x, "down")
            if rp is None:
                break
            rs = math.exp(ratio * math.log(rp))
            if rs > rn:
                break
            x = rp  # thinning: discard candidates violating r_n < r_n*
        if rp is None:
            led.truncated = True
            led.notice = f"no down-crossing of lambda+eta/2 after r_{len(led.r)} below T_max"
            break
        led.r_prime.append(rp)
        led.r_star.append(rs)
        n1 = len(led.r) + 1
        e = float(eps_rule(n1))
        if not (0 < e < led.eps[-1]):
            raise ParameterError("eps_rule must give a strictly decreasing positive sequence")
        rn1 = _crossing(A, tg, dg, rho - e, rp, "up")
        if rn1 is None:
            led.truncated = True
            led.notice = f"no crossing of rho-eps_{n1} after r'_{n1 - 1} below T_max"
            break
        led.eps.append(e)
        led.r.append(rn1)
    if led.depth == 0:
        raise ConstructionInfeasible("no complete anchor cycle below T_max (d never descends "
                                     "to lambda+eta/2)")
    return led


def find_anchor_sequences(A: GrowthFunction, rho, lam, eta, eps_rule=None, depth=None,
                          T_max=None, grid=None, eps1=None):
    """Anchor sequences r_n < r_n* < r_n' < r_{n+1} below ``T_max``.

    r_1 is the first point with d = rho - eps_1; r_n' is the first
    down-crossing of d through lambda + eta/2 after r_n whose partner
    r_n* = exp(log r_n' (lambda+eta/2)/(lambda+eta)) exceeds r_n (greedy
    thinning); r_{n+1} is the first point at or after r_n' with
    d = rho - eps_{n+1}.
    """
    eps1 = _validate(rho, lam, eta, eps1)
    eps_rule = eps_rule or _default_eps_rule(eps1)
    tg, T_max = _working_grid(A, grid, T_max)
    dg = _d(A, tg)
    led = _anchors(A, tg, dg, rho, lam, eta, eps1, eps_rule, depth)
    led.grid = _merge_anchors(tg, led)
    return led


def _merge_anchors(tg, led):
    return np.unique(np.concatenate([tg, led.r, led.r_prime, led.r_star]))


# --------------------------------------------------------------------------
# excursions, stairs, rises
# --------------------------------------------------------------------------

def excursion_profile(A: GrowthFunction, ledger: SequenceLedger, n, grid=None):
    """(M_n, R_n, D) for cycle ``n`` (1-based).

    M_n is the grid maximum of d over [r_n, r_n*] ([grid start, r_1*] for
    n = 1), R_n its smallest maximiser.
    """
    if not 1 <= n <= ledger.depth:
        raise DomainError(f"cycle {n} outside ledger depth {ledger.depth}")
    W = ledger.grid if grid is None else np.asarray(grid, dtype=float)
    rs = ledger.r_star[n - 1]
    a = W[0] if n == 1 else ledger.r[n - 1]
    sel = (W >= a) & (W <= rs)
    tw = W[sel]
    dw = _d(A, tw)
    k = int(np.argmax(dw))
    M, R = float(dw[k]), float(tw[k])
    tt, dd = tw[k:], dw[k:]
    D = np.maximum(np.maximum.accumulate(dd[::-1])[::-1], ledger.lam + ledger.eta)
    return M, R, EnvelopeSampler(tt, D)


def stair_descent(D: EnvelopeSampler, R_n, r_star_n, M_n, rho, floor=None):
    """Staircase sigma on [R_n, r_n*].

    Returns ``(segments, stairs, flags)``; ``stairs`` lists
    ``(u_k, u*_k, t_{k+1})``.  Constants hold the current level until the
    first integer t_{k+1} >= u_k + 1 where D drops below it; descents follow
    level - (rho+1)(log log t - log log t_{k+1}) until they meet D.
    ``floor`` (default: D(r_n*)) stops the staircase once reached.
    """
    if not R_n < r_star_n:
        raise DomainError("need R_n < r_n*")
    g, Dv = D.t, D.D
    floor = Dv[-1] if floor is None else floor
    slope = -(rho + 1.0)
    segs, stairs, flags = [], [], []
    u, level = float(R_n), float(D(R_n))
    if abs(level - M_n) > 1e-12 * max(1.0, abs(M_n)):
        flags.append("envelope at R_n differs from M_n")
    while True:
        if level <= floor:
            segs.append(Segment(u, r_star_n, "constant", level, u))
            break
        j = int(np.nonzero(Dv >= level)[0][-1])
        u_star = float(g[j])
        t_next = float(max(math.ceil(u + 1), math.floor(u_star) + 1))
        stairs.append((u, u_star, t_next))
        if t_next >= r_star_n:
            segs.append(Segment(u, r_star_n, "constant", level, u))
            break
        segs.append(Segment(u, t_next, "constant", level, u))
        s_next = math.log(math.log(t_next))
        i0 = int(np.searchsorted(g, t_next, side="left"))
        s_c = s_next + (level - Dv[i0:]) / (rho + 1.0)
        with np.errstate(over="ignore"):
            t_c = np.exp(np.exp(s_c))
        hit = np.nonzero(t_c <= g[i0:])[0]
        if hit.size == 0:
            segs.append(Segment(t_next, r_star_n, "loglog_descent", level, t_next, slope))
            flags.append(f"descent clamped at r*={r_star_n:.6g}")
            break
        i = i0 + int(hit[0])
        tc = float(min(t_c[hit[0]], r_star_n))
        segs.append(Segment(t_next, tc, "loglog_descent", level, t_next, slope))
        u, level = tc, float(Dv[i])
        if tc >= r_star_n:
            break
    return segs, stairs, flags


def connect_rise(sigma_at_r_star, M_next, r_star_n, r_prime_n, lam, eta, r_next=None):
    """Rise slope C_n, rise segment on [r_n*, r_n'] and constant on [r_n', r_next].

    Returns ``(C_n, rise, constant_or_None, flags)``.
    """
    if not r_star_n < r_prime_n:
        raise DomainError("need r_n* < r_n'")
    C = (M_next - sigma_at_r_star) / math.log((lam + eta) / (lam + eta / 2))
    flags = []
    if C < 0:
        flags.append(f"descending connector at r*={r_star_n:.6g}")
    rise = Segment(r_star_n, r_prime_n, "loglog_rise", sigma_at_r_star, r_star_n, C)
    const = None
    if r_next is not None and r_next > r_prime_n:
        const = Segment(r_prime_n, r_next, "constant", M_next, r_prime_n)
    return C, rise, const, flags


# --------------------------------------------------------------------------
# associated majorant
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MajorantPiece:
    a: float
    b: float
    rule: str                 # "power_of_sigma" or "power_of_envelope"
    envelope: EnvelopeSampler | None = None


@dataclass(frozen=True)
class AssociatedMajorant:
    """A*(t): t^D on the envelope pieces, t^min(sigma_pl, sigma) elsewhere.

    Taking the minimum with the unsmoothed sigma keeps A* <= t^sigma where
    smoothing dips below the piecewise function.
    """

    pieces: tuple
    sigma: PiecewiseProximateOrder

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "_ends", np.array([p.b for p in self.pieces]))

    @classmethod
    def power_of_sigma(cls, sigma):
        return cls((MajorantPiece(sigma.start, sigma.end, "power_of_sigma"),), sigma)

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        logt = np.log(t)
        out = logt * np.minimum(self.sigma.piecewise(t), self.sigma(t))
        idx = np.clip(np.searchsorted(self._ends, t, side="left"), 0, len(self.pieces) - 1)
        for k in np.unique(idx):
            p = self.pieces[k]
            if p.rule == "power_of_envelope":
                m = idx == k
                out[m] = logt[m] * p.envelope(t[m])
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return np.exp(self.log_value(t))

    def envelope_pieces(self):
        return [p for p in self.pieces if p.rule == "power_of_envelope"]


# --------------------------------------------------------------------------
# full pipeline
# --------------------------------------------------------------------------

def build_qpo(A: GrowthFunction, rho, lam, eta, grid=None, T_max=None, eps1=None,
              eps_rule=None, depth=None, smooth=True, blend_radius_rule=None):
    """Build (sigma, A*, ledger) for ``A`` with lower/upper orders (lam, rho)."""
    eps1 = _validate(rho, lam, eta, eps1)
    eps_rule = eps_rule or _default_eps_rule(eps1)
    tg, T_max = _working_grid(A, grid, T_max)
    dg = _d(A, tg)
    led = _anchors(A, tg, dg, rho, lam, eta, eps1, eps_rule, depth)
    W = _merge_anchors(tg, led)
    led.grid = W
    N = led.depth
    floor_level = lam + eta

    profiles = [excursion_profile(A, led, n) for n in range(1, N + 1)]
    for M, R, _ in profiles:
        led.M.append(M)
        led.R.append(R)

    segs, pieces, flags = [], [], []
    t0 = float(W[0])
    if led.R[0] > t0:
        segs.append(Segment(t0, led.R[0], "constant", led.M[0], t0))
        pieces.append(MajorantPiece(t0, led.R[0], "power_of_sigma"))
    stair_mask = np.zeros(W.size, dtype=bool)
    stair_floor = np.zeros(W.size)
    for n in range(N):
        M, R, D = profiles[n]
        rs, rp = led.r_star[n], led.r_prime[n]
        st_segs, stairs, st_flags = stair_descent(D, R, rs, M, rho, floor=floor_level)
        led.stairs.append(stairs)
        flags += st_flags
        segs += st_segs
        pieces.append(MajorantPiece(R, rs, "power_of_envelope", D))
        m = (W >= R) & (W <= rs)
        stair_mask |= m
        stair_floor[m] = D(W[m])
        s_star = st_segs[-1].end_value
        if n + 1 < N:
            target, nxt = led.M[n + 1], led.R[n + 1]
        else:
            tail = W[W >= rp]
            target = max(s_star, floor_level, float(_d(A, tail).max()))
            led.tail_level = target
            nxt = T_max
        C, rise, const, c_flags = connect_rise(s_star, target, rs, rp, lam, eta, nxt)
        led.C.append(C)
        flags += c_flags
        segs.append(rise)
        if const is not None:
            segs.append(const)
        pieces.append(MajorantPiece(rs, nxt, "power_of_sigma"))

    if led.truncated:
        flags.append("truncated: " + led.notice)
    sigma = PiecewiseProximateOrder(tuple(segs), rho=rho, lam=lam, eta=eta,
                                    flags=tuple(flags))
    if smooth:
        dW = _d(A, W)
        floor = np.where(stair_mask, np.maximum(dW, stair_floor), dW)
        sigma = smooth_corners(sigma, blend_radius_rule, protect=(W, floor))
    return sigma, AssociatedMajorant(tuple(pieces), sigma), led


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------

def _grid_points(grid, sigma):
    t = np.asarray(getattr(grid, "points", grid), dtype=float)
    return t[(t >= sigma.start * (1 - 1e-15)) & (t <= sigma.end * (1 + 1e-15))]


def derivative_witness(sigma, t):
    """Sampled |sigma'(t)| t log t."""
    return np.abs(sigma.slope_s(t))


def verify_qpo(sigma: PiecewiseProximateOrder, A_star: AssociatedMajorant, A: GrowthFunction,
               grid, ledger: SequenceLedger | None = None, windows=DEFAULT_WINDOWS,
               tail_tol=0.1):
    """Check the quasi proximate order properties on ``grid``; never raises on failure."""
    t = _grid_points(grid, sigma)
    rep = PropertyReport(flags=list(sigma.flags))
    logt = np.log(t)
    sig = sigma(t)
    lts = sig * logt                    # log t^sigma
    las = A_star.log_value(t)
    la = A.log_value(t)

    # (a) continuity and C^1
    rep.add("tiling", sigma.check_tiling(), sigma.junction_jump(), 1e-9,
            note="segments partition the domain, junction jump")
    mism, where = sigma.derivative_mismatch()
    rep.add("c1_smoothness", mism < 1e-6, mism, 1e-6, where,
            note="one-sided derivative mismatch")

    # (b) windowed tail limits
    st = tail_window_stats(logt, sig, windows=windows)
    lo_target = sigma.lam + sigma.eta
    rep.add("tail_sup", abs(st.sup - sigma.rho) <= tail_tol, st.sup, tail_tol,
            note=f"windowed, target rho={sigma.rho:g}")
    rep.add("tail_inf", abs(st.inf - lo_target) <= tail_tol, st.inf, tail_tol,
            note=f"windowed, target lambda+eta={lo_target:g}")

    # (c) derivative witness
    w = derivative_witness(sigma, t)
    K = sigma.max_piece_slope()
    if ledger is not None and ledger.C:
        K = max(max(ledger.C), sigma.rho + 1.0)
    k = int(np.argmax(w))
    rep.add("derivative_bound", bool(np.isfinite(w[k]) and w[k] <= 1.1 * K + 1e-12),
            float(w[k]), 1.1 * K, t[k], note="sup |sigma'(t)| t log t")

    # (d) A* non-decreasing
    dl = np.diff(las)
    tol = 1e-12 * np.maximum(1.0, np.abs(las[1:]))
    k = int(np.argmin(dl + tol))
    rep.add("majorant_monotone", bool(np.all(dl >= -tol)), float(dl[k]), 0.0, t[k + 1],
            note="min step of log A* on the grid")

    # (e) sandwich A* <= t^sigma <= (1 + slack) A*
    gap = lts - las
    low_ok = bool(np.all(gap >= -1e-12 * np.maximum(1.0, np.abs(lts))))
    rows, worst = [], (0.0, None, None, 0.0)
    for n, p in enumerate(A_star.envelope_pieces(), start=1):
        m = (t >= p.a) & (t <= p.b)
        if not m.any():
            continue
        sl = float(np.expm1(gap[m]).max())
        bound = 9.0 ** (sigma.rho + 1) / p.a
        rows.append((n, p.a, sl, bound))
        if bound > 0 and sl / bound >= worst[0]:
            worst = (sl / bound, bound, float(t[m][np.argmax(gap[m])]), sl)
    rep.details["sandwich_slack"] = rows
    if rows:
        ok = low_ok and all(sl <= b for _, _, sl, b in rows)
        rep.add("sandwich", ok, worst[3], worst[1], worst[2],
                note="worst slack relative to 9^(rho+1)/R_n")
    else:
        rep.add("sandwich", low_ok, float(np.expm1(gap).max()), None,
                note="no envelope pieces")

    # (f) majorization A <= t^sigma
    ex = la - lts
    k = int(np.argmax(ex))
    rep.add("majorization", bool(ex[k] <= 1e-12 * max(1.0, abs(lts[k]))), float(ex[k]), 0.0,
            t[k], note="max of log A - sigma log t")

    if ledger is not None and ledger.depth:
        hi = ledger.lam + ledger.eta
        worst_v, worst_t, ok = -math.inf, None, True
        for n in range(ledger.depth):
            rs, R = ledger.r_star[n], ledger.R[n]
            v = float(sigma.piecewise(rs))
            b = hi + 9.0 ** (sigma.rho + 1) / (R * math.log(R))
            ok &= hi - 1e-12 <= v <= b
            if v - b > worst_v:
                worst_v, worst_t = v - b, rs
        rep.add("anchor_value_bound", ok, worst_v, 0.0, worst_t,
                note="max of sigma(r_n*) - (lambda+eta+9^(rho+1)/(R_n log R_n))")
        err, err_t = 0.0, None
        for n in range(ledger.depth):
            target = ledger.M[n + 1] if n + 1 < len(ledger.M) else ledger.tail_level
            e = abs(float(sigma.piecewise(ledger.r_prime[n])) - target)
            if e >= err:
                err, err_t = e, ledger.r_prime[n]
        rep.add("rise_endpoint", err <= 1e-9, err, 1e-9, err_t,
                note="|sigma(r_n') - M_{n+1}|")
        bad = ledger.check_invariants()
        rep.add("ledger_invariants", not bad, len(bad), 0, note="; ".join(bad))

    # informational doubling ratio A*(2t)/A*(t)
    m = 2 * t <= sigma.end
    if m.any():
        r2 = A_star.log_value(2 * t[m]) - las[m]
        k = int(np.argmax(r2))
        rep.add("doubling_ratio", None, float(np.exp(r2[k])), None, t[m][k],
                note="sup A*(2t)/A*(t), no bound")
    return rep


# --------------------------------------------------------------------------
# eta sweep
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    eta: float
    witness: float
    lower_bound: float
    K: float


def eta_lower_bound(lam, rho, eta):
    """(rho - lam - eta) / log((lam + eta)/lam)."""
    return (rho - lam - eta) / math.log((lam + eta) / lam)


def eta_necessity_sweep(lam, rho, eta_list, T_max=1e8, ramp_fraction=0.01, per_decade=200):
    """Derivative witness of the built sigma on the step counterexample per eta."""
    from .growth import build_counterexample

    etas = [float(e) for e in eta_list]
    if any(b >= a for a, b in zip(etas, etas[1:])):
        raise ParameterError("eta_list must be strictly decreasing")
    if any(not 0 < e < rho - lam for e in etas):
        raise ParameterError("each eta must lie in (0, rho - lambda)")
    A = build_counterexample(lam, rho, ramp_fraction, T_max=T_max)
    grid = GridSpec.log_uniform(max(A.domain_start, E), T_max, per_decade)
    rows = []
    for eta in etas:
        sigma, _, led = build_qpo(A, rho, lam, eta, grid=grid, T_max=T_max)
        w = float(derivative_witness(sigma, led.grid).max())
        K = max(max(led.C), rho + 1.0)
        rows.append(SweepRow(eta, w, eta_lower_bound(lam, rho, eta), K))
    return rows


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

CSV_COLUMNS = ("t", "sigma", "t_pow_sigma", "A", "A_star", "deriv_witness")


def sigma_table(sigma, A_star, A, t):
    t = np.asarray(t, dtype=float)
    sig = sigma(t)
    return {
        "t": t, "sigma": sig, "t_pow_sigma": np.exp(sig * np.log(t)),
        "A": A(t), "A_star": A_star(t), "deriv_witness": derivative_witness(sigma, t),
    }


def export_sigma_csv(sigma, A_star, A, t, path=None):
    """Write the CSV (columns t, sigma, t_pow_sigma, A, A_star, deriv_witness).

    Returns the text; floats use ``repr`` so output is byte-reproducible.
    """
    tab = sigma_table(sigma, A_star, A, t)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in zip(*(tab[c] for c in CSV_COLUMNS)):
        w.writerow([repr(float(v)) for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
