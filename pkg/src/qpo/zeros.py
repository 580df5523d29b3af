"""Zero sequences in the disc, zero counts and canonical products.

The canonical product of genus s over zeros a_k is

    P(z) = prod_k E(A(z, a_k), s),   A(z, a) = (1 - |a|^2) / (1 - z conj(a)),

with the primary factor E(w, s) = (1 - w) exp(w + w^2/2 + ... + w^s/s).
Since A(z, 0) = 1 identically, zeros at the origin are carried by a plain
factor z^m instead.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterError, SingularityError

ZERO_TOL = 1e-13
ANGLE_TOL = 1e-12


# --------------------------------------------------------------------------
# sequences
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroSequence:
    """Zeros a_k, |a_k| < 1, sorted by modulus (then argument)."""

    points: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.points, dtype=complex))
        if a.ndim != 1:
            raise ParameterError("zeros must be a 1-D sequence")
        if a.size and np.abs(a).max() >= 1:
            raise DomainError("zeros must lie in the open unit disc")
        order = np.lexsort((np.angle(a) % (2 * np.pi), np.abs(a)))
        object.__setattr__(self, "points", a[order])

    def __len__(self):
        return self.points.size

    @property
    def moduli(self):
        return np.abs(self.points)

    @property
    def convergence_exponent_mu(self):
        """Estimate of the exponent mu on the stored prefix.

        Uses mu + 1 = sup over the last half of k of log k / log 1/(1-|a_k|),
        clipped at 0.
        """
        n = len(self)
        if n < 2:
            return 0.0
        k = np.arange(1, n + 1)
        x = -np.log1p(-self.moduli)
        tail = slice(n // 2, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.log(k[tail]) / x[tail]
        q = q[np.isfinite(q)]
        return max(0.0, float(q.max()) - 1.0) if q.size else 0.0

    def genus_sum(self, s):
        """(sum (1-|a_k|)^{s+1}, share contributed by the last half of the prefix)."""
        w = (1.0 - self.moduli) ** (s + 1)
        total = float(np.sum(w))
        if total == 0:
            return 0.0, 0.0
        return total, float(np.sum(w[len(self) // 2:]) / total)

    # -- I/O ------------------------------------------------------------------

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im"])
        for a in self.points:
            w.writerow([repr(float(a.real)), repr(float(a.imag))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source):
        text = source if "\n" in source else open(source, encoding="utf-8").read()
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(np.array([complex(float(r["re"]), float(r["im"])) for r in rows]))


def _points(zeros):
    if zeros is None:
        return np.empty(0, dtype=complex)
    if isinstance(zeros, ZeroSequence):
        return zeros.points
    return np.atleast_1d(np.asarray(zeros, dtype=complex))


# --------------------------------------------------------------------------
# counting
# --------------------------------------------------------------------------

def _circ_dist(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % (2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def _annulus_args(zeros, r):
    a = _points(zeros)
    m = np.abs(a)
    sel = (m >= r) & (m <= (1 + r) / 2)
    return np.sort(np.angle(a[sel]) % (2 * np.pi))


def zero_count_polar(zeros, r):
    """n_1(r): most zeros in {r <= |a| <= (1+r)/2, |arg a - phi| <= (pi/4)(1-r)}.

    Exact sweep: some maximal closed window has a zero on its left edge, so it
    suffices to count, for each in-annulus argument theta_k, the arguments in
    [theta_k, theta_k + 2w] (circularly).
    """
    th = _annulus_args(zeros, r)
    n = th.size
    if n == 0:
        return 0
    w = math.pi / 4 * (1 - r)
    if 2 * w >= 2 * math.pi - ANGLE_TOL:
        return n
    ext = np.concatenate([th, th + 2 * math.pi])
    right = np.searchsorted(ext, th + 2 * w + ANGLE_TOL, side="right")
    return int(np.max(right - np.arange(n)))


def zero_count_polar_bruteforce(zeros, r, n_anchors=10_000, zero_anchored=True):
    """n_1(r) by direct counting over anchor angles phi.

    ``n_anchors`` uniform anchors are always tried; with ``zero_anchored`` the
    anchors theta_k +- w are added, which makes the maximum exact.
    """
    th = _annulus_args(zeros, r)
    if th.size == 0:
        return 0
    w = math.pi / 4 * (1 - r)
    phis = 2 * np.pi * np.arange(n_anchors) / n_anchors
    if zero_anchored:
        phis = np.concatenate([phis, th + w, th - w])
    best = 0
    for chunk in np.array_split(phis, max(1, phis.size // 512)):
        c = np.sum(_circ_dist(th[None, :], chunk[:, None]) <= w + ANGLE_TOL, axis=1)
        best = max(best, int(c.max()))
    return best


def zero_count_disc(zeros, center, radius):
    """Number of zeros in the closed disc |a - center| <= radius."""
    if abs(center) + radius >= 1:
        raise DomainError("disc must lie inside the unit disc")
    a = _points(zeros)
    return int(np.sum(np.abs(a - center) <= radius))


@dataclass(frozen=True)
class ZeroRings:
    """Zeros arranged on circles: ring j has ``counts[j]`` equally spaced
    zeros on |z| = radii[j], rotated by ``offsets[j]``.

    Used for gap series, whose zero counts are far too large to store.
    """

    radii: np.ndarray
    counts: np.ndarray
    offsets: np.ndarray

    def to_sequence(self, max_points=10 ** 6):
        if int(np.sum(self.counts)) > max_points:
            raise ParameterError("too many zeros to materialise")
        pts = [rho * np.exp(1j * (off + 2 * np.pi * np.arange(m) / m))
               for rho, m, off in zip(self.radii, self.counts, self.offsets)]
        return ZeroSequence(np.concatenate(pts) if pts else np.empty(0))


def zero_count_polar_rings(rings: ZeroRings, r):
    """n_1(r) for ring-structured zeros.

    Per ring in the annulus the best closed window of length 2w holds
    floor(w m / pi) + 1 of its m equally spaced zeros; the sum over rings is
    exact for a single ring and an upper bound otherwise.
    """
    w = math.pi / 4 * (1 - r)
    sel = (rings.radii >= r) & (rings.radii <= (1 + r) / 2)
    m = rings.counts[sel].astype(float)
    per = np.minimum(np.floor(w * m / math.pi + ANGLE_TOL) + 1, m)
    return int(np.sum(per))


def gap_series_zero_rings(model):
    """Zero rings of a positive-coefficient gap series.

    Between consecutive terms n1 < n2 the two terms balance on
    |z| = exp((log a_n1 - log a_n2)/(n2 - n1)); the zeros there are
    approximated by the n2 - n1 solutions of z^{n2-n1} = -a_n1/a_n2.
    """
    n, la = model._n, model._la
    dn = np.diff(n)
    rho = np.exp((la[:-1] - la[1:]) / dn)
    ok = rho < 1
    return ZeroRings(rho[ok], dn[ok], np.pi / dn[ok])


# --------------------------------------------------------------------------
# factors and products
# --------------------------------------------------------------------------

def log_weierstrass_factor(w, s):
    """log E(w, s) (complex, principal branch of log(1-w))."""
    if s < 0 or int(s) != s:
        raise ParameterError("genus must be a non-negative integer")
    w = np.asarray(w, dtype=complex)
    acc = np.zeros_like(w)
    p = np.ones_like(w)
    for j in range(1, int(s) + 1):
        p = p * w
        acc = acc + p / j
    with np.errstate(divide="ignore"):
        return np.log(1 - w) + acc


def weierstrass_factor(w, s):
    """E(w, s) = (1 - w) exp(w + ... + w^s/s)."""
    if s < 1 or int(s) != s:
        raise ParameterError("need integer s >= 1")
    w = np.asarray(w, dtype=complex)
    with np.errstate(over="ignore"):
        out = np.where(w == 1, 0j, np.exp(log_weierstrass_factor(np.where(w == 1, 0, w), s)))
    return out if out.ndim else complex(out)


def interpolation_kernel(z, zeta):
    """A(z, zeta) = (1 - |zeta|^2) / (1 - z conj(zeta))."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    den = 1 - z * np.conj(zeta)
    if np.any(den == 0):
        raise SingularityError("z conj(zeta) = 1")
    out = (1 - np.abs(zeta) ** 2) / den
    return out if out.ndim else complex(out)


class CanonicalValue(NamedTuple):
    log_modulus: np.ndarray
    argument: np.ndarray


def canonical_product(z, zeros, s, with_tail=False, chunk=256):
    """(log|P(z)|, arg P(z)) for the canonical product of genus ``s``.

    Terms are accumulated in index order.  A point within 1e-13 of a zero
    gives log|P| = -inf.  With ``with_tail`` a third value reports the
    absolute contribution of the last quarter of the terms to log|P|.
    """
    a = _points(zeros)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zf = np.atleast_1d(z).ravel()
    at0 = np.abs(a) == 0
    m0 = int(np.sum(at0))
    a = a[~at0]
    logmod = np.zeros(zf.size)
    arg = np.zeros(zf.size)
    tail = np.zeros(zf.size)
    q = a.size - a.size // 4
    for i0 in range(0, zf.size, chunk):
        zc = zf[i0:i0 + chunk]
        if a.size:
            A = (1 - np.abs(a)[None, :] ** 2) / (1 - zc[:, None] * np.conj(a)[None, :])
            L = log_weierstrass_factor(A, s)
            logmod[i0:i0 + chunk] = np.sum(L.real, axis=1)
            arg[i0:i0 + chunk] = np.sum(L.imag, axis=1)
            tail[i0:i0 + chunk] = np.abs(np.sum(L.real[:, q:], axis=1))
        if m0:
            with np.errstate(divide="ignore"):
                logmod[i0:i0 + chunk] += m0 * np.log(np.abs(zc))
            arg[i0:i0 + chunk] += m0 * np.angle(zc)
    allz = _points(zeros)
    if allz.size:
        for i in range(zf.size):
            if np.min(np.abs(zf[i] - allz)) < ZERO_TOL:
                logmod[i], arg[i] = -np.inf, 0.0
    arg = np.angle(np.exp(1j * arg))
    if scalar:
        out = (float(logmod[0]), float(arg[0]))
        return (*out, float(tail[0])) if with_tail else CanonicalValue(*out)
    shp = z.shape
    out = (logmod.reshape(shp), arg.reshape(shp))
    return (*out, tail.reshape(shp)) if with_tail else CanonicalValue(*out)


def tsuji_sum(z, zeros, exponent):
    """sum_k |A(z, a_k)|^exponent (index order)."""
    if exponent <= 0:
        raise ParameterError("exponent must be positive")
    a = _points(zeros)
    z = np.asarray(z, dtype=complex)
    zf = np.atleast_1d(z).ravel()
    if a.size == 0:
        out = np.zeros(zf.size)
    else:
        A = (1 - np.abs(a)[None, :] ** 2) / (1 - zf[:, None] * np.conj(a)[None, :])
        out = np.sum(np.abs(A) ** exponent, axis=1)
    return float(out[0]) if z.ndim == 0 else out.reshape(z.shape)


def product_upper_bound(z, zeros, s):
    """Upper bound 2^{s+2} sum |A(z, a_k)|^{s+1} for log|P(z)|."""
    return 2.0 ** (s + 2) * tsuji_sum(z, zeros, s + 1)


def jensen_residual(zeros, s, r, n_theta=4096, rtol=1e-12, cap=2 ** 20):
    """(circle mean of log|P| - log|P(0)|) - sum_{|a_k|<r} log(r/|a_k|).

    Zeros at the origin are excluded from P(0) and the sum (they contribute
    log r to both sides).
    """
    a = _points(zeros)
    n, prev = int(n_theta), None
    while True:
        zc = r * np.exp(2j * np.pi * np.arange(n) / n)
        mean = float(np.mean(canonical_product(zc, a, s).log_modulus))
        if prev is not None and abs(mean - prev) <= rtol * max(1.0, abs(mean)) or n >= cap:
            break
        prev, n = mean, 2 * n
    nz = a[np.abs(a) > 0]
    p0 = float(np.sum(log_weierstrass_factor(1 - np.abs(nz) ** 2, s).real))
    inside = nz[np.abs(nz) < r]
    m0 = int(np.sum(np.abs(a) == 0))
    jensen = float(np.sum(np.log(r / np.abs(inside)))) + m0 * math.log(r)
    return (mean - p0) - jensen


# --------------------------------------------------------------------------
# exceptional discs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExceptionalDiscs:
    centers: np.ndarray
    radii: np.ndarray

    def contains(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.centers.size == 0:
            return np.zeros(z.size, dtype=bool)
        d = np.abs(z[:, None] - self.centers[None, :])
        return np.any(d <= self.radii[None, :], axis=1)

    def __iter__(self):
        return iter(zip(self.centers, self.radii))

    def __len__(self):
        return self.centers.size


def exceptional_discs(zeros, mu):
    """Discs D(a_k, (1 - |a_k|^2)^{mu+4})."""
    if mu < 0:
        raise ParameterError("mu must be non-negative")
    a = _points(zeros)
    return ExceptionalDiscs(a.copy(), (1 - np.abs(a) ** 2) ** (mu + 4))


def fit_lower_constant(z, zeros, s, mu, eps):
    """Smallest K with log|P(z)| >= K log(1-|z|) sum|A|^{mu+1+eps} on the samples.

    Only an empirical constant; no absolute bound is claimed.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    lp = canonical_product(z, zeros, s).log_modulus
    rhs = np.log(1 - np.abs(z)) * tsuji_sum(z, zeros, mu + 1 + eps)
    neg = (lp < 0) & (rhs < 0)
    if not neg.any():
        return 0.0
    return float(np.max(lp[neg] / rhs[neg]))
