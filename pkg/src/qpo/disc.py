"""Analytic functions in the unit disc: maximum modulus, integral means, orders.

All moduli are carried as logarithms; exp-type test functions reach
|f| ~ exp(1e9) long before r gets close to 1.

A power series is stored sparsely as integer exponents with log-coefficients
(and optional coefficient arguments).  On the uniform circle grid
theta_j = 2 pi j / N the phase of z^n is computed exactly as
2 pi ((n mod N) j mod N) / N in integer arithmetic, so exponents far larger
than N stay accurate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .errors import ConfigurationError, DomainError, ParameterError, QuadratureError
from .tails import DEFAULT_WINDOWS, tail_window_stats

N_THETA_MIN = 64
N_THETA_CAP = 2 ** 20
TERM_WINDOW = 40.0          # log-units below the largest term that are kept


def default_n_theta(r):
    """Angular resolution: at least 8 samples per boundary length scale 1-r."""
    need = 8.0 / max(1.0 - r, 1e-300)
    n = 2 ** int(math.ceil(math.log2(max(need, N_THETA_MIN))))
    return int(min(max(n, N_THETA_MIN), N_THETA_CAP))


# --------------------------------------------------------------------------
# closed forms: z (complex array) -> log|f(z)|
# --------------------------------------------------------------------------

def _monomial(z, k=1):
    with np.errstate(divide="ignore"):
        return k * np.log(np.abs(z))


def _constant(z, value=1.0):
    return np.full(np.shape(z), math.log(abs(value)))


def _exp_pole(z, c=1.0, a=1.0):
    # exp(c (1-z)^(-a))
    return c * np.real((1.0 - z) ** (-a))


def _exp_cayley(z, c=1.0):
    # exp(c (1+z)/(1-z)); log|f| is c times the Poisson kernel
    return c * np.real((1.0 + z) / (1.0 - z))


def _polynomial(z, coeffs=(1.0,)):
    c = np.asarray(coeffs, dtype=complex)[::-1]
    with np.errstate(divide="ignore"):
        return np.log(np.abs(np.polyval(c, z)))


CLOSED_FORMS = {
    "monomial": _monomial,
    "constant": _constant,
    "exp_pole": _exp_pole,
    "exp_cayley": _exp_cayley,
    "polynomial": _polynomial,
}

# --------------------------------------------------------------------------
# model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticFunctionModel:
    """An analytic function on ``|z| <= r_max < 1``.

    kind ``"power_series"``: params ``exponents`` (non-negative ints),
    ``log_coeffs`` and optional ``phases`` (coefficient arguments).
    kind ``"closed_form"``: params ``expr`` (key of :data:`CLOSED_FORMS`) plus
    its parameters.
    kind ``"canonical_product"``: params ``zeros`` (complex) and ``genus``.
    """

    kind: str
    params: dict
    r_max: float = 1.0 - 1e-12
    zeros: object = None

    def __post_init__(self):
        if self.kind not in ("power_series", "closed_form", "canonical_product"):
            raise ParameterError(f"unknown model kind {self.kind!r}")
        if not 0 < self.r_max < 1:
            raise ParameterError("r_max must lie in (0, 1)")
        if self.kind == "closed_form" and self.params.get("expr") not in CLOSED_FORMS:
            raise ParameterError(f"unknown closed form {self.params.get('expr')!r}")
        if self.kind == "power_series":
            n = np.asarray(self.params["exponents"], dtype=np.int64)
            la = np.asarray(self.params["log_coeffs"], dtype=float)
            ph = np.asarray(self.params.get("phases", np.zeros(n.size)), dtype=float)
            if n.shape != la.shape or n.shape != ph.shape or n.ndim != 1:
                raise ParameterError("exponents, log_coeffs and phases must align")
            if n.size and (n.min() < 0 or np.any(np.diff(n) <= 0)):
                raise ParameterError("exponents must be strictly increasing and >= 0")
            object.__setattr__(self, "_n", n)
            object.__setattr__(self, "_la", la)
            object.__setattr__(self, "_ph", ph)

    # -- evaluation -----------------------------------------------------------

    def _check_r(self, r):
        if np.any(np.asarray(r) > self.r_max * (1 + 1e-15)) or np.any(np.asarray(r) < 0):
            raise DomainError(f"radius outside [0, {self.r_max}]")

    def log_abs(self, z):
        """log|f(z)| at arbitrary points (vectorised)."""
        z = np.asarray(z, dtype=complex)
        self._check_r(np.abs(z))
        if self.kind == "closed_form":
            p = dict(self.params)
            return CLOSED_FORMS[p.pop("expr")](z, **p)
        if self.kind == "canonical_product":
            from .zeros import canonical_product
            return canonical_product(z, self.params["zeros"], self.params["genus"]).log_modulus
        return self._series_log_abs_points(z)

    def _series_log_abs_points(self, z):
        shape = z.shape
        z = np.atleast_1d(z).ravel()
        out = np.empty(z.size)
        with np.errstate(divide="ignore"):
            lr = np.log(np.abs(z))
        for k in range(z.size):
            L = self._la + self._n * lr[k]
            if self._n.size == 0:
                out[k] = -np.inf
                continue
            if not np.isfinite(lr[k]):
                # z = 0: only the constant term survives
                out[k] = self._la[0] if self._n[0] == 0 else -np.inf
                continue
            m = L >= L.max() - TERM_WINDOW
            ang = self._ph[m] + self._n[m] * np.angle(z[k])
            s = np.sum(np.exp(L[m] - L.max()) * np.exp(1j * ang))
            out[k] = math.log(abs(s)) + L.max() if s != 0 else -np.inf
        return out.reshape(shape)

    def log_abs_circle(self, r, n_theta):
        """log|f(r e^{2 pi i j/N})| for j = 0..N-1."""
        self._check_r(r)
        N = int(n_theta)
        if self.kind != "power_series":
            z = r * np.exp(2j * np.pi * np.arange(N) / N)
            return self.log_abs(z)
        if self._n.size == 0:
            return np.full(N, -np.inf)
        lr = math.log(r) if r > 0 else -np.inf
        L = self._la + self._n * lr if r > 0 else np.where(self._n == 0, self._la, -np.inf)
        Lmax = L.max()
        keep = np.nonzero(L >= Lmax - TERM_WINDOW)[0]
        j = np.arange(N, dtype=np.int64)
        acc = np.zeros(N, dtype=complex)
        for chunk in np.array_split(keep, max(1, keep.size // 32)):
            nm = (self._n[chunk] % N)[:, None]
            ph = 2 * np.pi * ((nm * j[None, :]) % N) / N + self._ph[chunk][:, None]
            acc += np.sum(np.exp(L[chunk] - Lmax)[:, None] * np.exp(1j * ph), axis=0)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(acc)) + Lmax

    def truncation_bound(self, r):
        """Relative size of the terms dropped below the kept window at radius r."""
        if self.kind != "power_series" or self._n.size == 0 or r <= 0:
            return 0.0
        L = self._la + self._n * math.log(r)
        drop = L < L.max() - TERM_WINDOW
        if not drop.any():
            return 0.0
        return float(np.exp(logsumexp(L[drop]) - L.max()))

    @property
    def positive_coefficients(self):
        return self.kind == "power_series" and bool(np.all(self._ph == 0))

    @property
    def log_origin_value(self):
        """log|f(0)|."""
        return float(self.log_abs(np.array([0j]))[0])

    # -- serialisation --------------------------------------------------------

    def to_dict(self):
        p = {}
        for k, v in self.params.items():
            v = np.asarray(v) if isinstance(v, (list, tuple, np.ndarray)) else v
            if isinstance(v, np.ndarray) and np.iscomplexobj(v):
                v = [[float(x.real), float(x.imag)] for x in v]
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            p[k] = v
        return {"kind": self.kind, "params": p, "r_max": self.r_max}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, obj):
        p = dict(obj["params"])
        if obj["kind"] == "canonical_product":
            p["zeros"] = np.array([complex(a, b) for a, b in p["zeros"]])
        return cls(obj["kind"], p, float(obj.get("r_max", 1 - 1e-12)))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def closed_form(expr, r_max=1 - 1e-12, **params):
    return AnalyticFunctionModel("closed_form", {"expr": expr, **params}, r_max)


def power_series(exponents, log_coeffs, phases=None, r_max=1 - 1e-12):
    p = {"exponents": np.asarray(exponents, dtype=np.int64),
         "log_coeffs": np.asarray(log_coeffs, dtype=float)}
    if phases is not None:
        p["phases"] = np.asarray(phases, dtype=float)
    return AnalyticFunctionModel("power_series", p, r_max)


def canonical_product_model(zeros, genus, r_max=1 - 1e-12):
    from .zeros import ZeroSequence
    zs = zeros if isinstance(zeros, ZeroSequence) else ZeroSequence(zeros)
    return AnalyticFunctionModel("canonical_product", {"zeros": zs.points, "genus": int(genus)},
                                 r_max, zeros=zs)


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscGrid:
    radii: np.ndarray
    n_theta: tuple | None = None      # per radius; None -> default_n_theta

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 1 or np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] >= 1:
            raise ConfigurationError("radii must be strictly increasing in [0, 1)")
        object.__setattr__(self, "radii", r)
        if self.n_theta is not None:
            nt = tuple(int(n) for n in self.n_theta)
            if len(nt) != r.size or min(nt) < N_THETA_MIN:
                raise ConfigurationError("need one n_theta >= 64 per radius")
            object.__setattr__(self, "n_theta", nt)

    @classmethod
    def dyadic(cls, j_max, j_min=1):
        j = np.arange(j_min, j_max + 1)
        return cls(1.0 - 2.0 ** (-j))

    @classmethod
    def log_uniform(cls, t_min, t_max, per_decade=20):
        """Radii with 1/(1-r) log-uniform on [t_min, t_max]."""
        if not 1 < t_min < t_max:
            raise ConfigurationError("need 1 < t_min < t_max")
        n = max(2, int(math.ceil(per_decade * math.log10(t_max / t_min))) + 1)
        t = np.geomspace(t_min, t_max, n)
        return cls(1.0 - 1.0 / t)

    def n_at(self, k):
        return default_n_theta(self.radii[k]) if self.n_theta is None else self.n_theta[k]

    @property
    def log_t(self):
        """log 1/(1-r) for every radius."""
        return -np.log1p(-self.radii)


# --------------------------------------------------------------------------
# maximum modulus and orders
# --------------------------------------------------------------------------

def log_max_modulus(f: AnalyticFunctionModel, r, n_theta=None):
    """log M(r, f): uniform angular grid, then bounded Brent refinement."""
    if n_theta is None:
        n_theta = default_n_theta(r)
    if n_theta < N_THETA_MIN:
        raise ConfigurationError("n_theta must be >= 64")
    f._check_r(r)
    if r == 0:
        return float(f.log_abs(np.array([0j]))[0])
    if f.positive_coefficients:
        # non-negative coefficients: the maximum sits at z = r
        return float(logsumexp(f._la + f._n * math.log(r)))
    vals = f.log_abs_circle(r, n_theta)
    j = int(np.argmax(vals))
    best = float(vals[j])
    h = 2 * np.pi / n_theta
    res = minimize_scalar(lambda th: -float(f.log_abs(np.array([r * np.exp(1j * th)]))[0]),
                          bounds=(h * (j - 1), h * (j + 1)), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, h)})
    return max(best, -float(res.fun))


def max_modulus(f: AnalyticFunctionModel, r, n_theta=None):
    """M(r, f).  Returns ``inf`` when M overflows a double; use
    :func:`log_max_modulus` for the log-form value."""
    lm = log_max_modulus(f, r, n_theta)
    return math.exp(lm) if lm < 709.0 else math.inf


def _logplus(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 1.0, np.log(np.where(x > 1.0, x, 1.0)), 0.0)


def disc_orders(f: AnalyticFunctionModel, grid: DiscGrid, windows=DEFAULT_WINDOWS):
    """Windowed (sup, inf) of log+ log+ M(r) / log 1/(1-r) over the grid tail."""
    lm = np.array([log_max_modulus(f, r, grid.n_at(k)) for k, r in enumerate(grid.radii)])
    x = grid.log_t
    y = _logplus(np.maximum(lm, 0.0)) / x
    if np.all(lm <= 0):
        return 0.0, 0.0
    st = tail_window_stats(x, y, windows=windows)
    return st.sup, st.inf


# --------------------------------------------------------------------------
# integral means
# --------------------------------------------------------------------------

def _mean_abs_pow(vals, p):
    a = np.abs(vals)
    scale = a.max()
    if scale == 0:
        return 0.0
    return scale * float(np.mean((a / scale) ** p)) ** (1.0 / p)


def _hits_zero(f, r, n, vals):
    """A sample is a zero hit when non-finite or within 1e-13 of a known zero."""
    if not np.all(np.isfinite(vals)):
        return True
    zs = f.params.get("zeros") if f.kind == "canonical_product" else None
    if zs is None or len(zs) == 0:
        return False
    a = np.asarray(zs, dtype=complex)
    near = np.abs(np.abs(a) - r) < 1e-13 + 2 * np.pi * r / n
    if not near.any():
        return False
    th = np.angle(a[near]) % (2 * np.pi)
    j = np.round(th * n / (2 * np.pi)) % n
    z = r * np.exp(2j * np.pi * j / n)
    return bool(np.any(np.abs(z - a[near]) < 1e-13))


def integral_mean_p(f: AnalyticFunctionModel, r, p, n_theta=None, rtol=1e-6,
                    cap=N_THETA_CAP, _retry=True):
    """m_p(r, log|f|) by the trapezoid rule, doubling until the change is < rtol."""
    if p < 1:
        raise ParameterError("need p >= 1")
    n = default_n_theta(r) if n_theta is None else int(n_theta)
    prev = None
    while True:
        vals = f.log_abs_circle(r, n)
        if _hits_zero(f, r, n, vals):
            if _retry:
                return integral_mean_p(f, r * (1 - 1.0 / n), p, n, rtol, cap, _retry=False)
            raise QuadratureError(f"zero of f on or near the circle r={r}")
        cur = _mean_abs_pow(vals, p)
        if prev is not None and abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        if n >= cap:
            return cur
        prev, n = cur, 2 * n


def mean_orders(f: AnalyticFunctionModel, p, grid: DiscGrid, windows=DEFAULT_WINDOWS,
                rtol=1e-6):
    """Windowed (sup, inf) of log+ m_p(r) / log 1/(1-r) over the grid tail."""
    mp = np.array([integral_mean_p(f, r, p, grid.n_at(k), rtol=rtol)
                   for k, r in enumerate(grid.radii)])
    x = grid.log_t
    y = _logplus(mp) / x
    if np.all(mp <= 1.0):
        return 0.0, 0.0
    st = tail_window_stats(x, y, windows=windows)
    return st.sup, st.inf


def radius_rows(f: AnalyticFunctionModel, grid: DiscGrid, zeros=None, ps=(1, 2, 4)):
    """Per-radius rows (r, M, m_1, m_2, m_4, n1); M in log form as log_M."""
    from .zeros import zero_count_polar

    for k, r in enumerate(grid.radii):
        row = {"r": float(r), "log_M": log_max_modulus(f, r, grid.n_at(k))}
        for p in ps:
            row[f"m_{p}"] = integral_mean_p(f, r, p, grid.n_at(k))
        row["n1"] = zero_count_polar(zeros, r) if zeros is not None else 0
        yield row


# --------------------------------------------------------------------------
# gap series with prescribed max term
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GapSeriesReport:
    contact_radii: np.ndarray
    dropped_radii: np.ndarray        # sampled radii where log mu < B (non-convex parts)
    max_deficit: float
    n_terms: int


def max_term_log(f: AnalyticFunctionModel, r):
    """log mu(r) = max_n log|a_n| + n log r."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return np.max(f._la[None, :] + f._n[None, :] * np.log(r)[:, None], axis=1)


def gap_series_from_profile(B, degree_cap, t_range=(2.0, 1e6), samples_per_decade=400,
                            exponents_per_decade=20, r_max=None):
    """Power series whose log max term is the convex minorant of ``B``.

    ``B(r)`` is the target log max term.  Candidate exponents are
    geometrically spaced up to ``degree_cap``; their coefficients come from
    the discrete Legendre transform log a_n = min_r (B(r) - n log r) over
    radii with 1/(1-r) log-uniform in ``t_range``.  Only exponents that are
    the strictly largest term at some sampled radius are kept (ties go to the
    smaller exponent), which yields a gap series.

    Returns ``(model, report)``.
    """
    t0, t1 = t_range
    m = max(2, int(math.ceil(samples_per_decade * math.log10(t1 / t0))) + 1)
    t = np.geomspace(t0, t1, m)
    r = 1.0 - 1.0 / t
    logr = np.log1p(-1.0 / t)
    b = np.asarray(B(r), dtype=float)
    k = max(2, int(math.ceil(exponents_per_decade * math.log10(max(degree_cap, 10)))) + 1)
    n = np.unique(np.concatenate([[0], np.round(np.geomspace(1, degree_cap, k))]).astype(np.int64))
    la = np.min(b[None, :] - n[:, None].astype(float) * logr[None, :], axis=1)
    terms = la[:, None] + n[:, None].astype(float) * logr[None, :]
    winner = np.argmax(terms, axis=0)         # first index on ties -> smallest n
    keep = np.unique(winner)
    n, la = n[keep], la[keep]
    model = power_series(n, la, r_max=r_max if r_max is not None else float(r[-1]))
    mu = np.max(la[:, None] + n[:, None].astype(float) * logr[None, :], axis=0)
    deficit = b - mu
    tol = 1e-9 * np.maximum(1.0, np.abs(b))
    rep = GapSeriesReport(contact_radii=r[deficit <= tol], dropped_radii=r[deficit > tol],
                          max_deficit=float(deficit.max()), n_terms=int(n.size))
    return model, rep


def profile_from_growth(A, floor=0.0):
    """B(r) = A(1/(1-r)) for a growth function A (clamped to its domain)."""
    def B(r):
        t = 1.0 / (1.0 - np.asarray(r, dtype=float))
        t = np.clip(t, A.domain_start, A.domain_end)
        return np.maximum(np.exp(A.log_value(t)), floor)
    return B
