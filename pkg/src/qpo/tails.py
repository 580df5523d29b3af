"""Tail-window statistics used as finite-range surrogates for limsup / liminf."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_WINDOWS = 32


@dataclass(frozen=True)
class TailStats:
    sup: float
    inf: float
    # (window end abscissa, running sup, running inf), one row per window
    windows: tuple

    def as_rows(self):
        return [dict(end=e, sup=s, inf=i) for e, s, i in self.windows]


def tail_window_stats(x, y, windows=DEFAULT_WINDOWS, tail=0.5) -> TailStats:
    """Windowed running sup/inf of ``y`` over the last ``tail`` fraction of ``x``.

    ``x`` is an increasing abscissa in the scale where the windows should be
    uniform (log t for growth functions, log 1/(1-r) for the disc).  NaNs in
    ``y`` are ignored.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("x and y must be 1-D arrays of equal length >= 2")
    cut = x[0] + (1.0 - tail) * (x[-1] - x[0])
    mask = (x >= cut) & np.isfinite(y)
    xs, ys = x[mask], y[mask]
    if xs.size == 0:
        raise ValueError("empty tail")
    edges = np.linspace(xs[0], xs[-1], windows + 1)
    rows = []
    run_sup, run_inf = -np.inf, np.inf
    for k in range(windows):
        lo, hi = edges[k], edges[k + 1]
        sel = (xs >= lo) & (xs <= hi) if k == windows - 1 else (xs >= lo) & (xs < hi)
        if sel.any():
            run_sup = max(run_sup, float(ys[sel].max()))
            run_inf = min(run_inf, float(ys[sel].min()))
        rows.append((float(hi), run_sup, run_inf))
    return TailStats(sup=run_sup, inf=run_inf, windows=tuple(rows))


def slope_fit(x, y):
    """Least-squares slope of y against x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])
