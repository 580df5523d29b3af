"""Growth functions A(t), their growth index d(t) and order estimates.

A growth function is a positive, non-decreasing, continuous function on a
truncated half-line ``[domain_start, domain_end]``.  Three representations are
supported: a named closed form, a monotone table interpolated in
(log t, log A), and the step function with linear ramps used as the
counterexample showing that a quasi proximate order needs ``eta > 0``.

All evaluation goes through :meth:`GrowthFunction.log_value` so that very large
values never overflow.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigurationError, DomainError, ParameterError
from .tails import DEFAULT_WINDOWS, tail_window_stats

E = math.e
_REL = 1e-12


# --------------------------------------------------------------------------
# closed forms: each maps log t (array) -> log A (array)
# --------------------------------------------------------------------------

def _power(logt, c):
    return c * logt


def _constant(logt, value):
    return np.full_like(logt, math.log(value))


def _oscillating_power(logt, mid, amp):
    # t^{mid + amp sin(log log log t)}; the exponent is frozen at `mid` while
    # log log t <= 1 (t <= e^e) where the triple logarithm is not defined.
    llt = np.log(np.maximum(logt, E))
    return (mid + amp * np.sin(np.log(llt))) * logt


CLOSED_FORMS = {
    "power": _power,
    "constant": _constant,
    "oscillating_power": _oscillating_power,
}


@dataclass(frozen=True)
class GridSpec:
    """Strictly increasing sample points, uniform in log t."""

    points: np.ndarray
    per_decade: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2 or np.any(np.diff(pts) <= 0):
            raise ConfigurationError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def log_uniform(cls, start, stop, per_decade=200):
        if not (0 < start < stop):
            raise ConfigurationError("need 0 < start < stop")
        n = max(2, int(math.ceil(per_decade * math.log10(stop / start))) + 1)
        pts = np.exp(np.linspace(math.log(start), math.log(stop), n))
        pts[0], pts[-1] = start, stop
        return cls(pts, per_decade)

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class GrowthFunction:
    """A non-decreasing positive function on ``[domain_start, domain_end]``.

    ``kind`` is one of ``"closed_form"``, ``"table"`` or ``"step_with_ramps"``;
    ``params`` holds the kind-specific data (see :func:`closed_form`,
    :func:`from_table` and :func:`build_counterexample`).
    """

    kind: str
    params: dict
    domain_start: float
    domain_end: float

    def __post_init__(self):
        if self.kind not in ("closed_form", "table", "step_with_ramps"):
            raise ParameterError(f"unknown growth kind {self.kind!r}")
        if not self.domain_start < self.domain_end:
            raise ParameterError("empty domain")
        if self.kind == "closed_form" and self.params.get("expr") not in CLOSED_FORMS:
            raise ParameterError(f"unknown closed form {self.params.get('expr')!r}")

    # -- evaluation ---------------------------------------------------------

    def _check_domain(self, t):
        lo = self.domain_start * (1 - _REL)
        hi = self.domain_end * (1 + _REL)
        if np.any(t < lo) or np.any(t > hi) or np.any(~np.isfinite(t)):
            raise DomainError(
                f"t outside [{self.domain_start}, {self.domain_end}]")

    def log_value(self, t):
        """log A(t); vectorised."""
        t = np.asarray(t, dtype=float)
        self._check_domain(t)
        logt = np.log(t)
        if self.kind == "closed_form":
            p = dict(self.params)
            fn = CLOSED_FORMS[p.pop("expr")]
            out = fn(logt, **p)
        elif self.kind == "table":
            out = self._pchip(logt)
        else:
            out = self._log_step_with_ramps(t)
        return out if out.ndim else float(out)

    def __call__(self, t):
        return np.exp(self.log_value(t))

    @cached_property
    def _pchip(self):
        lt = np.log(np.asarray(self.params["t"], dtype=float))
        la = np.log(np.asarray(self.params["values"], dtype=float))
        return PchipInterpolator(lt, la, extrapolate=False)

    @cached_property
    def ramp_knots(self):
        """Knots r_1 < r_2 < ... of the step function (covering the domain)."""
        lam, rho = self.params["lambda"], self.params["rho"]
        logs = [math.log(self.params.get("r1", 2.0))]
        stop = math.log(self.domain_end)
        while logs[-1] <= stop:
            logs.append(logs[-1] * rho / lam)
        return np.exp(np.array(logs))

    def _log_step_with_ramps(self, t):
        rho = self.params["rho"]
        frac = self.params["ramp_fraction"]
        knots = self.ramp_knots
        logk = np.log(knots)
        shape = t.shape
        t = np.atleast_1d(t)
        # index n with knots[n] < t <= knots[n+1]
        n = np.clip(np.searchsorted(knots, t, side="left") - 1, 0, knots.size - 2)
        lo, hi = knots[n], knots[n + 1]
        eps = frac * (hi - lo)
        start = hi - eps
        w = np.clip((t - start) / eps, 0.0, 1.0)
        la, lb = rho * logk[n], rho * logk[n + 1]
        with np.errstate(divide="ignore"):
            out = np.logaddexp(np.log1p(-w) + la, np.log(w) + lb)
        # t at or below the first knot: value of the completed first ramp
        out = np.where(t <= knots[0], rho * logk[0], out)
        return out.reshape(shape)

    # -- structure ------------------------------------------------------------

    def breakpoints(self):
        """Points where the representation changes formula (inside the domain)."""
        if self.kind == "table":
            pts = np.asarray(self.params["t"], dtype=float)
        elif self.kind == "step_with_ramps":
            k = self.ramp_knots
            eps = self.params["ramp_fraction"] * np.diff(k)
            pts = np.concatenate([k, k[1:] - eps])
        else:
            pts = np.empty(0)
        pts = np.unique(pts)
        return pts[(pts >= self.domain_start) & (pts <= self.domain_end)]

    # -- serialisation --------------------------------------------------------

    def to_dict(self):
        return {"kind": self.kind, "params": _jsonable(self.params),
                "domain": [self.domain_start, self.domain_end]}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, obj):
        kind = obj["kind"]
        params = dict(obj["params"])
        t0, t1 = obj["domain"]
        if kind == "table":
            return from_table(params["t"], params["values"])
        return cls(kind, params, float(t0), float(t1))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _jsonable(p):
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in p.items()}


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def closed_form(expr, domain, **params):
    """Named closed-form growth function, e.g. ``closed_form("power", (e, 1e8), c=2)``."""
    return GrowthFunction("closed_form", {"expr": expr, **params},
                          float(domain[0]), float(domain[1]))


def from_table(t, values):
    """Tabulated growth function; monotone cubic interpolation in (log t, log A)."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ParameterError("table knots must be strictly increasing")
    if np.any(v <= 0) or np.any(np.diff(v) < 0):
        raise ParameterError("table values must be positive and non-decreasing")
    return GrowthFunction("table", {"t": t.tolist(), "values": v.tolist()},
                          float(t[0]), float(t[-1]))


def build_counterexample(lam, rho, ramp_fraction=0.01, T_max=1e8, r1=2.0,
                         domain_start=E):
    """Step function with ramps: r_{n+1} = r_n^{rho/lam}, A = r_n^rho on the steps.

    On ``[r_{n+1} - eps_n, r_{n+1}]`` with ``eps_n = ramp_fraction (r_{n+1} - r_n)``
    the step is replaced by the straight segment up to ``r_{n+1}^rho``.
    """
    if not (0 < lam < rho):
        raise ParameterError("need 0 < lambda < rho")
    if not (0 < ramp_fraction < 1):
        raise ParameterError("ramp_fraction must lie in (0, 1)")
    return GrowthFunction(
        "step_with_ramps",
        {"lambda": float(lam), "rho": float(rho),
         "ramp_fraction": float(ramp_fraction), "r1": float(r1)},
        float(domain_start), float(T_max))


# --------------------------------------------------------------------------
# growth index and order estimates
# --------------------------------------------------------------------------

def eval_growth(A: GrowthFunction, t):
    return A(t)


def growth_index(A: GrowthFunction, t):
    """d(t) = log+ A(t) / log t, defined for t >= max(domain start, e)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < E * (1 - 1e-15)):
        raise DomainError("growth index is only defined for t >= e")
    d = np.maximum(A.log_value(t), 0.0) / np.log(t)
    return d if d.ndim else float(d)


@dataclass(frozen=True)
class OrderEstimate:
    rho_hat: float
    lambda_hat: float
    window_report: tuple

    def __post_init__(self):
        if not (0 <= self.lambda_hat <= self.rho_hat < math.inf):
            raise ValueError("inconsistent order estimate")


def sample_points(A: GrowthFunction, grid: GridSpec):
    """Grid points merged with the breakpoints of ``A`` lying inside the grid range."""
    g = grid.points
    bp = A.breakpoints()
    bp = bp[(bp >= g[0]) & (bp <= g[-1])]
    return np.unique(np.concatenate([g, bp]))


def estimate_orders(A: GrowthFunction, grid: GridSpec, windows=DEFAULT_WINDOWS):
    if len(grid) < 100:
        raise ConfigurationError("order estimation needs at least 100 grid points")
    t = sample_points(A, grid)
    if t[0] < E * (1 - 1e-15):
        raise ConfigurationError("grid must start at or above e")
    d = growth_index(A, t)
    st = tail_window_stats(np.log(t), d, windows=windows)
    rows = tuple((math.exp(e), s, i) for e, s, i in st.windows)
    return OrderEstimate(rho_hat=st.sup, lambda_hat=st.inf, window_report=rows)
