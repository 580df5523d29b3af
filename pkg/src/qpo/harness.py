"""Experiment configs, drivers and run manifests.

Each experiment id maps to a driver that returns ``(reports, tables)``:
named PropertyReports and named CSV tables (column tuple, rows).  The
runner writes the tables and a manifest into the output directory.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .report import PropertyReport
from .tails import slope_fit

__version__ = "0.1.0"

EXPERIMENTS = ("thm1", "eta-necessity", "linden", "thm2", "prop2", "prop3", "thm3",
               "warschawski")

COLUMNS = {
    "sigma": ("t", "sigma", "t_pow_sigma", "A", "A_star", "deriv_witness"),
    "ledger": ("n", "r", "r_prime", "r_star", "M", "R", "C"),
    "eta_sweep": ("eta", "witness", "lower_bound", "K"),
    "linden": ("r", "log_M", "m_1", "m_2", "m_4"),
    "linden_orders": ("p", "rho_p", "sigma_M"),
    "gap_means": ("r", "p", "m_p"),
    "gap_terms": ("n", "log_a"),
    "zero_counts": ("r", "n1"),
    "sector": ("r", "min_log_mod_G", "bound"),
    "real_part": ("r", "max_abs_re_f", "bound"),
    "mean_order": ("r", "L", "l", "lhs_over_rhs"),
}


@dataclass
class ExperimentConfig:
    experiment: str
    lam: float | None = None
    rho: float | None = None
    eta: float | None = None
    eps: float | None = None
    eps1: float | None = None
    p_list: list = field(default_factory=list)
    eta_list: list = field(default_factory=list)
    per_decade: int | None = None
    T_max: float | None = None
    r_max: float | None = None
    ramp_fraction: float = 0.01
    q: float | None = None
    l_mid: float | None = None
    l_amp: float | None = None
    a: float | None = None
    seed: int = 0
    out_dir: str = "qpo_out"

    def to_dict(self):
        return dataclasses.asdict(self)


DEFAULTS = {
    "thm1": dict(lam=1.0, rho=2.0, eta=0.5, per_decade=200, T_max=1e8),
    "eta-necessity": dict(lam=1.0, rho=2.0, eta_list=[0.5, 0.25, 0.1, 0.05],
                          per_decade=200, T_max=1e8),
    "linden": dict(p_list=[1, 2, 4], r_max=1 - 1e-3, per_decade=20),
    "thm2": dict(lam=0.3, rho=0.8, eps=0.1, p_list=[1, 2], per_decade=10, T_max=1e9,
                 r_max=1 - 1e-6),
    "prop2": dict(lam=0.3, rho=0.8, eps=0.1, per_decade=20, T_max=1e9, r_max=1 - 1e-6),
    "prop3": dict(l_mid=1.7, l_amp=0.3, q=0.9, eps=0.2, a=1.0, T_max=1e8, per_decade=8),
    "thm3": dict(lam=1.5, eps=0.2, r_max=1 - 1e-4, per_decade=10),
    "warschawski": dict(l_mid=1.5, l_amp=0.5, q=0.9, T_max=1e12, per_decade=4),
}

_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def _validate(cfg: ExperimentConfig):
    errs = []

    def need(name, ok, msg):
        if not ok:
            errs.append(f"{name}: {msg}")

    def pos(name):
        v = getattr(cfg, name)
        need(name, isinstance(v, (int, float)) and math.isfinite(v) and v > 0,
             f"must be a positive number, got {v!r}")
        return not errs or not errs[-1].startswith(name + ":")

    ex = cfg.experiment
    if ex in ("thm1", "eta-necessity", "thm2", "prop2"):
        if pos("lam") and pos("rho"):
            need("rho", cfg.rho > cfg.lam, "must exceed lam")
    if ex == "thm1" and pos("eta") and cfg.lam is not None and cfg.rho is not None:
        need("eta", cfg.eta < cfg.rho - cfg.lam, "must satisfy 0 < eta < rho - lam")
    if ex == "eta-necessity":
        need("eta_list", len(cfg.eta_list) > 0, "must be non-empty")
        for i, e in enumerate(cfg.eta_list):
            need(f"eta_list[{i}]", isinstance(e, (int, float)) and
                 0 < e < (cfg.rho or 0) - (cfg.lam or 0), "must lie in (0, rho - lam)")
        need("eta_list", all(b < a for a, b in zip(cfg.eta_list, cfg.eta_list[1:])),
             "must be strictly decreasing")
    if ex in ("thm1", "eta-necessity", "thm2", "prop2", "prop3", "warschawski"):
        if pos("T_max"):
            need("T_max", cfg.T_max > math.e ** 2, "must exceed e^2")
    if ex in ("linden", "thm2", "thm3", "prop2"):
        need("r_max", isinstance(cfg.r_max, (int, float)) and 0.9 < cfg.r_max < 1,
             "must lie in (0.9, 1)")
    if ex in ("linden", "thm2"):
        need("p_list", len(cfg.p_list) > 0, "must be non-empty")
        for i, p in enumerate(cfg.p_list):
            need(f"p_list[{i}]", isinstance(p, (int, float)) and p >= 1, "must be >= 1")
    if ex in ("thm2", "prop2", "prop3", "thm3"):
        pos("eps")
    if ex in ("prop3", "warschawski"):
        need("q", isinstance(cfg.q, (int, float)) and 0 < cfg.q < 1, "must lie in (0, 1)")
        if pos("l_mid"):
            need("l_amp", isinstance(cfg.l_amp, (int, float)) and 0 <= cfg.l_amp < cfg.l_mid,
                 "must lie in [0, l_mid)")
    if ex == "prop3":
        pos("a")
    if ex == "thm3":
        pos("lam")
    need("per_decade", isinstance(cfg.per_decade, int) and cfg.per_decade > 0,
         "must be a positive integer")
    need("ramp_fraction", 0 < cfg.ramp_fraction < 0.5, "must lie in (0, 0.5)")
    need("seed", isinstance(cfg.seed, int), "must be an integer")
    if errs:
        raise ConfigurationError("invalid configuration: " + "; ".join(errs), errors=errs)


def config_from_dict(obj, overrides=None):
    """Validated ExperimentConfig from a mapping plus optional overrides."""
    if not isinstance(obj, dict):
        raise ConfigurationError("configuration must be a JSON object")
    data = dict(obj)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    ex = data.get("experiment")
    if ex not in EXPERIMENTS:
        raise ConfigurationError(f"experiment: unknown id {ex!r}", errors=[f"experiment: {ex!r}"])
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ConfigurationError("unknown fields: " + ", ".join(unknown),
                                 errors=[f"{k}: unknown field" for k in unknown])
    merged = dict(DEFAULTS[ex])
    merged.update(data)
    cfg = ExperimentConfig(**merged)
    _validate(cfg)
    if ex == "thm1" and cfg.eps1 is None:
        cfg.eps1 = min(1.0, cfg.eta) / 2
    return cfg


def parse_config(path, overrides=None):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config is not valid JSON: {e}")
    return config_from_dict(obj, overrides)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def export_csv(rows, path, columns):
    """Write ``rows`` (sequences or dicts) under the header ``columns``.

    Floats are written with ``repr`` so reruns are byte-identical; an empty
    row list gives a header-only file.
    """
    text = csv_text(rows, columns)
    _atomic_write(path, text)
    return text


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# drivers
# --------------------------------------------------------------------------

def _drive_thm1(cfg):
    from .construct import build_qpo, verify_qpo
    from .growth import GridSpec, build_counterexample

    A = build_counterexample(cfg.lam, cfg.rho, cfg.ramp_fraction, T_max=cfg.T_max)
    grid = GridSpec.log_uniform(max(A.domain_start, math.e), cfg.T_max, cfg.per_decade)
    sigma, A_star, led = build_qpo(A, cfg.rho, cfg.lam, cfg.eta, grid=grid, T_max=cfg.T_max,
                                   eps1=cfg.eps1)
    rep = verify_qpo(sigma, A_star, A, grid, ledger=led)
    from .construct import sigma_table
    tab = sigma_table(sigma, A_star, A, led.grid)
    sig_rows = list(zip(*(tab[c] for c in COLUMNS["sigma"])))
    led_rows = [(i + 1, led.r[i], led.r_prime[i], led.r_star[i], led.M[i], led.R[i], led.C[i])
                for i in range(led.depth)]
    return {"qpo": rep}, {"sigma": sig_rows, "ledger": led_rows}


def _drive_eta(cfg):
    from .construct import eta_necessity_sweep

    rows = eta_necessity_sweep(cfg.lam, cfg.rho, cfg.eta_list, T_max=cfg.T_max,
                               ramp_fraction=cfg.ramp_fraction, per_decade=cfg.per_decade)
    rep = PropertyReport()
    for r in rows:
        rep.add(f"witness_eta_{r.eta:g}", r.witness >= 0.9 * r.lower_bound, r.witness,
                0.9 * r.lower_bound, note="witness >= 0.9 x lower bound")
    w = [r.witness for r in rows]
    rep.add("monotone_in_eta", all(b > a for a, b in zip(w, w[1:])), w[-1] if w else None,
            note="witness increases as eta decreases")
    return {"eta_necessity": rep}, {
        "eta_sweep": [(r.eta, r.witness, r.lower_bound, r.K) for r in rows]}


def linden_estimates(r_max=1 - 1e-3, p_list=(1, 2, 4), per_decade=20, t_min=10.0):
    """Windowed orders of f = exp((1-z)^-2): sigma_M and rho_p per p, plus rows."""
    from .disc import DiscGrid, closed_form, disc_orders, integral_mean_p, log_max_modulus
    from .tails import tail_window_stats

    f = closed_form("exp_pole", c=1.0, a=2.0)
    grid = DiscGrid.log_uniform(t_min, 1.0 / (1.0 - r_max), per_decade)
    sig, _ = disc_orders(f, grid)
    x = grid.log_t
    means = {}
    for p in p_list:
        means[p] = np.array([integral_mean_p(f, r, p, grid.n_at(k))
                             for k, r in enumerate(grid.radii)])
    rho = {}
    for p in p_list:
        y = np.log(np.maximum(means[p], 1.0)) / x
        rho[p] = tail_window_stats(x, y).sup
    rows = []
    for k, r in enumerate(grid.radii):
        row = [float(r), log_max_modulus(f, r, grid.n_at(k))]
        row += [float(means[p][k]) if p in means else float("nan") for p in (1, 2, 4)]
        rows.append(row)
    return sig, rho, rows


def _drive_linden(cfg):
    sig, rho, rows = linden_estimates(cfg.r_max, cfg.p_list, cfg.per_decade)
    rep = PropertyReport()
    ps = sorted(rho)
    for p in ps:
        rep.add(f"rho_{p:g}_le_sigma", rho[p] <= sig + 0.05, rho[p], sig + 0.05,
                note="rho_p <= sigma_M + 0.05")
        rep.add(f"sigma_le_rho_{p:g}_plus", sig <= rho[p] + 1 / p + 0.1, sig,
                rho[p] + 1 / p + 0.1, note="sigma_M <= rho_p + 1/p + 0.1")
    vals = [rho[p] for p in ps]
    rep.add("rho_p_increasing", all(b >= a for a, b in zip(vals, vals[1:])), vals[-1],
            note="rho_p non-decreasing in p")
    orders = [(p, rho[p], sig) for p in ps]
    return {"linden": rep}, {"linden": rows, "linden_orders": orders}


def gap_series_for(lam, rho, T_max=1e9, ramp_fraction=0.01, r_max=1 - 1e-6):
    """Gap series whose max term follows the counterexample profile A(1/(1-r))."""
    from .disc import gap_series_from_profile, profile_from_growth
    from .growth import build_counterexample

    A = build_counterexample(lam, rho, ramp_fraction, T_max=T_max, domain_start=1.0)
    B = profile_from_growth(A)
    t_hi = min(1.0 / (1.0 - r_max), T_max / 10)
    cap = 10.0 ** math.ceil(math.log10(t_hi) + 6)
    return gap_series_from_profile(B, cap, t_range=(2.0, t_hi), r_max=r_max)


def _last_decades(x, y, decades=2):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = x >= x[-1] - decades * math.log(10)
    return x[sel], y[sel]


def _drive_thm2(cfg):
    from .disc import DiscGrid, disc_orders, integral_mean_p

    f, gap = gap_series_for(cfg.lam, cfg.rho, cfg.T_max, cfg.ramp_fraction, cfg.r_max)
    grid = DiscGrid.log_uniform(1e2, 1e6, cfg.per_decade)
    rep = PropertyReport()
    sig, lam_M = disc_orders(f, grid)
    rep.add("sigma_M", None, sig, cfg.rho, note="windowed estimate vs target rho")
    rep.add("lambda_M", None, lam_M, cfg.lam, note="windowed estimate vs target lam")
    bound = 1 + cfg.eps + 0.15
    rows = []
    for p in cfg.p_list:
        m = np.array([integral_mean_p(f, r, p, grid.n_at(k)) for k, r in enumerate(grid.radii)])
        rows += [(float(r), p, float(v)) for r, v in zip(grid.radii, m)]
        x, y = _last_decades(grid.log_t, np.log(m))
        s = slope_fit(x, y)
        rep.add(f"m_{p:g}_slope", s <= bound, s, bound,
                note="slope of log m_p vs log 1/(1-r), last two decades")
    terms = list(zip(f._n.tolist(), f._la.tolist()))
    rep.details["n_terms"] = gap.n_terms
    return {"thm2": rep}, {"gap_means": rows, "gap_terms": terms}


def _drive_prop2(cfg):
    from .disc import DiscGrid
    from .zeros import gap_series_zero_rings, zero_count_polar_rings

    f, gap = gap_series_for(cfg.lam, cfg.rho, cfg.T_max, cfg.ramp_fraction, cfg.r_max)
    rings = gap_series_zero_rings(f)
    grid = DiscGrid.log_uniform(1e2, 1e6, cfg.per_decade)
    n1 = np.array([zero_count_polar_rings(rings, r) for r in grid.radii])
    rep = PropertyReport()
    bound = 1 + cfg.eps + 0.15
    x, y = _last_decades(grid.log_t, n1.astype(float))
    nz = y > 0
    if np.count_nonzero(nz) >= 2:
        s = slope_fit(x[nz], np.log(y[nz]))
        rep.add("n1_slope", s <= bound, s, bound,
                note="slope of log n1 vs log 1/(1-r) over radii with n1 > 0")
    else:
        rep.add("n1_slope", True, float(np.max(y)), bound,
                note="n1 vanishes on all but at most one radius of the last two decades")
    rows = [(float(r), int(v)) for r, v in zip(grid.radii, n1)]
    return {"prop2": rep}, {"zero_counts": rows}


def _drive_prop3(cfg):
    from .strip import cartwright_witness, oscillating_l

    l = oscillating_l(cfg.l_mid, cfg.l_amp)
    r = np.geomspace(10.0, cfg.T_max, int(cfg.per_decade * math.log10(cfg.T_max / 10)) + 1)
    a = cfg.a

    def G(w):
        return -np.real(np.asarray(w, dtype=complex) ** a)

    rep = cartwright_witness(G, l, cfg.q, r_grid=r, eps=cfg.eps,
                             l2=cfg.l_mid + cfg.l_amp)
    return {"prop3": rep}, {"sector": rep.details["rows"]}


def _drive_thm3(cfg):
    from .strip import real_part_witness

    lam = cfg.lam
    r = 1.0 - np.geomspace(0.1, 1.0 - cfg.r_max,
                           int(cfg.per_decade * math.log10(0.1 / (1 - cfg.r_max))) + 1)

    def f(z):
        return (1.0 - np.asarray(z, dtype=complex)) ** (-lam) - 1.0

    rep = real_part_witness(f, lambda rr: np.full(np.shape(rr), lam), cfg.eps, r)
    return {"thm3": rep}, {"real_part": rep.details["rows"]}


def _drive_warschawski(cfg):
    from .strip import (StripProfile, mean_proximate_order_L, omega_from_l, oscillating_l,
                        sector_modulus_relation, warschawski_map)

    rep = PropertyReport()
    flat = StripProfile.constant(math.pi / 2)
    err = 0.0
    for u in np.linspace(0.0, 20.0, 11):
        for v in np.linspace(-math.pi / 2, math.pi / 2, 7):
            err = max(err, abs(warschawski_map(flat, float(u), float(v)) - complex(u, v)))
    rep.add("straight_strip_identity", err <= 1e-10, err, 1e-10)

    l = oscillating_l(cfg.l_mid, cfg.l_amp)
    prof = omega_from_l(l, cfg.q, T_max=cfg.T_max)
    rep.flags.extend(prof.flags)
    top = math.log10(cfg.T_max)
    r = np.logspace(1.0, top, int(cfg.per_decade * (top - 1)) + 1)
    rows = []
    for ri in r:
        L = mean_proximate_order_L(l, float(ri))
        lhs, rhs = sector_modulus_relation(prof, 1.0, float(ri), 0.0)
        rows.append((float(ri), L, float(l(ri)), lhs / rhs))
    last = np.logspace(top - 1, top, 21)
    gap = max(abs(mean_proximate_order_L(l, float(x)) - float(l(x))) for x in last)
    rep.add("L_minus_l_final_decade", gap < 0.05, gap, 0.05,
            note="max |L(r) - l(r)| over the final decade")
    rt = float(r[-1])
    half = math.pi / (2 * float(l(rt)) * cfg.q)
    lhs = [sector_modulus_relation(prof, 1.0, rt, th)[0] for th in np.linspace(-half, half, 9)]
    var = (max(lhs) - min(lhs)) / max(lhs)
    rep.add("modulus_theta_invariance", var < 0.01, var, 0.01)
    return {"warschawski": rep}, {"mean_order": rows}


DRIVERS = {
    "thm1": _drive_thm1,
    "eta-necessity": _drive_eta,
    "linden": _drive_linden,
    "thm2": _drive_thm2,
    "prop2": _drive_prop2,
    "prop3": _drive_prop3,
    "thm3": _drive_thm3,
    "warschawski": _drive_warschawski,
}


# --------------------------------------------------------------------------
# runner
# --------------------------------------------------------------------------

@dataclass
class RunManifest:
    config: dict
    version: str
    started: str
    finished: str | None = None
    reports: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    status: str = "incomplete"
    error: str | None = None
    workers: int = 1

    @property
    def passed(self):
        return self.status == "pass"

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self, **kw):
        kw.setdefault("indent", 2)
        kw.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kw)


def _stamp():
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> RunManifest:
    """Run the driver for ``cfg`` and write its CSVs and ``manifest.json``.

    Driver exceptions are re-raised after a manifest marked "incomplete"
    (with the error text) has been written next to any partial output.
    """
    out = Path(os.environ.get("QPO_OUT") or out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest(config=cfg.to_dict(), version=__version__, started=_stamp())
    try:
        reports, tables = DRIVERS[cfg.experiment](cfg)
        for name in sorted(tables):
            fname = f"{cfg.experiment}_{name}.csv"
            text = export_csv(tables[name], out / fname, COLUMNS[name])
            man.files.append({"name": fname, "bytes": len(text.encode()),
                              "sha256": hashlib.sha256(text.encode()).hexdigest()})
        man.reports = {k: v.to_dict() for k, v in sorted(reports.items())}
        ok = all(v.all_passed for v in reports.values())
        man.status = "pass" if ok else "fail"
    except Exception as e:
        man.error = f"{type(e).__name__}: {e}"
        raise
    finally:
        man.finished = _stamp()
        _atomic_write(out / "manifest.json", man.to_json() + "\n")
    man.report_objects = reports  # in-memory only
    return man
