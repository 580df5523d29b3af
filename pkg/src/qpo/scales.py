"""Smoothing integrals, Polya order, psi-tilde and radial densities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConfigurationError, DomainError, ParameterError, QuadratureError

# --------------------------------------------------------------------------
# I_alpha
# --------------------------------------------------------------------------


def smoothing_integral_I_alpha(f, R, alpha, R0=0.0, epsrel=1e-10, limit=200):
    """(1-R)^{-1/alpha} (int_0^R log+ M(t,f) (R-t)^{1/alpha-1} dt + log+ M(R0,f)).

    The endpoint factor (R-t)^{1/alpha-1} is handled by an algebraic weight.
    """
    from .disc import log_max_modulus

    if not 0.5 <= alpha < 1:
        raise ParameterError("need 1/2 <= alpha < 1")
    if not 0 <= R0 < R < 1:
        raise ParameterError("need 0 <= R0 < R < 1")

    def lpm(t):
        return max(0.0, log_max_modulus(f, t))

    beta = 1.0 / alpha - 1.0
    val, err, info = _quad_checked(lpm, 0.0, R, weight="alg", wvar=(0.0, beta),
                                   epsrel=epsrel, limit=limit)
    return (1.0 - R) ** (-1.0 / alpha) * (val + lpm(R0))


def _quad_checked(fn, a, b, epsrel, limit, **kw):
    val, err, info, *rest = quad(fn, a, b, epsabs=0.0, epsrel=epsrel, limit=limit,
                                 full_output=1, **kw)
    tol = max(epsrel * abs(val), 1e-14)
    if rest and err > 10 * tol:
        raise QuadratureError(f"quadrature did not converge: {rest[0]}", achieved=err)
    return val, err, info


# --------------------------------------------------------------------------
# Polya order
# --------------------------------------------------------------------------

def _log_sampler(psi, log):
    if log:
        return lambda x: np.asarray(psi(np.asarray(x, dtype=float)), dtype=float)
    return lambda x: np.log(np.asarray(psi(np.asarray(x, dtype=float)), dtype=float))


@dataclass(frozen=True)
class PolyaResult:
    rho: float
    caramata_ratio: float      # max sampled psi(2x)/psi(x) over the tail
    finite: bool


def polya_order(psi, C_list=None, x_list=None, threshold=1e3, resolution=0.01,
                rho_max=64.0, caramata_bound=1e6, log=False, detail=False):
    """Estimate rho*(psi) = sup{rho : limsup psi(Cx)/(C^rho psi(x)) = infinity}.

    The limsup is replaced by the maximum over the sampled (C, x) pairs and
    "infinity" by ``threshold``; the ratio is monotone in rho so the sup is
    bisected to ``resolution``.  Work is done on log psi (pass ``log=True``
    when ``psi`` already returns log psi).  Returns 0 when no rho >= 0
    qualifies and ``inf`` when the doubling ratio psi(2x)/psi(x) exceeds
    ``caramata_bound`` on the last quarter of the x samples.
    """
    lp = _log_sampler(psi, log)
    C = np.geomspace(2.0, 1e100, 100) if C_list is None else np.asarray(C_list, dtype=float)
    x = np.geomspace(1.0, 1e6, 61) if x_list is None else np.asarray(x_list, dtype=float)
    if np.any(C <= 1) or np.any(x < 1):
        raise ConfigurationError("need C > 1 and x >= 1")
    lx = lp(x)
    xt = x[x.size - max(1, x.size // 4):]
    dbl = float(np.max(lp(2 * xt) - lp(xt)))
    if not math.isfinite(dbl) or dbl > math.log(caramata_bound):
        res = PolyaResult(math.inf, math.exp(min(dbl, 700.0)), False)
        return res if detail else math.inf
    lcx = lp((C[:, None] * x[None, :]).ravel()).reshape(C.size, x.size)
    gain = lcx - lx[None, :]              # log psi(Cx) - log psi(x)
    gain = np.where(np.isfinite(gain), gain, -np.inf)   # drop overflowed samples
    logC = np.log(C)[:, None]
    lt = math.log(threshold)

    def exceeds(rho):
        return bool(np.max(gain - rho * logC) > lt)

    if not exceeds(0.0):
        rho = 0.0
    else:
        lo, hi = 0.0, 1.0
        while exceeds(hi):
            lo, hi = hi, 2 * hi
            if hi > rho_max:
                raise ConfigurationError("Polya order beyond rho_max")
        while hi - lo > resolution / 4:
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if exceeds(mid) else (lo, mid)
        rho = 0.5 * (lo + hi)
    res = PolyaResult(rho, math.exp(dbl), True)
    return res if detail else rho


def psi_tilde(psi, t, epsrel=1e-12, limit=200):
    """int_1^t psi(x)/x dx, integrated in u = log x."""
    if t < 1:
        raise DomainError("need t >= 1")
    if t == 1:
        return 0.0
    val, _, _ = _quad_checked(lambda u: float(psi(math.exp(u))), 0.0, math.log(t),
                              epsrel=epsrel, limit=limit)
    return val


def psi_from_majorant(log_A_star, sigma_M, eps):
    """log psi(t) = (1 - 1/sigma_M) log A*(t) + (1+eps) log t.

    ``log_A_star`` is a callable returning log A*(t).  For sigma_M <= 1 the
    first term is dropped (its exponent is clipped at zero).
    """
    k = max(0.0, 1.0 - 1.0 / sigma_M) if sigma_M > 0 else 0.0

    def lpsi(t):
        t = np.asarray(t, dtype=float)
        return k * log_A_star(t) + (1.0 + eps) * np.log(t)
    return lpsi


# --------------------------------------------------------------------------
# radial sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialSet:
    """A finite union of disjoint intervals [a, b) within [0, 1)."""

    intervals: tuple

    def __post_init__(self):
        iv = sorted((float(a), float(b)) for a, b in self.intervals)
        for a, b in iv:
            if not 0 <= a <= b <= 1:
                raise DomainError("intervals must lie in [0, 1]")
        for (a0, b0), (a1, b1) in zip(iv, iv[1:]):
            if a1 < b0:
                raise DomainError("intervals must be disjoint")
        object.__setattr__(self, "intervals", tuple(iv))

    def measure_from(self, r):
        """m(E intersect [r, 1))."""
        return float(sum(max(0.0, b - max(a, r)) for a, b in self.intervals))


def upper_density(E: RadialSet, r_grid, tail=0.5):
    """max over the tail radii of m(E intersect [r,1))/(1-r).

    The tail is the last ``tail`` fraction of the grid in log 1/(1-r).
    """
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.size == 0 or np.any(r >= 1) or np.any(r < 0):
        raise ConfigurationError("radii must lie in [0, 1)")
    x = -np.log1p(-r)
    cut = x.min() + (1 - tail) * (x.max() - x.min())
    rr = r[x >= cut]
    return float(max(E.measure_from(q) / (1 - q) for q in rr))
