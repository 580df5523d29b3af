"""Step counterexample A(t) and the smooth majorant built on top of it.

A(t) jumps between growth index lam and rho on a super-exponential
sequence of radii, so its growth index has no limit. The construction
produces sigma(t) and A*(t) = t^sigma(t) with A <= A*, A* increasing,
lam <= sigma <= rho + eta and a bounded derivative witness.

    python demos/01_counterexample_and_majorant.py [out_dir]
"""

import math
import sys
from pathlib import Path

import numpy as np

from qpo.construct import build_qpo, export_sigma_csv, verify_qpo
from qpo.growth import GridSpec, build_counterexample

lam, rho, eta, T_max = 1.0, 2.0, 0.5, 1e8
out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

A = build_counterexample(lam, rho, 0.01, T_max=T_max)
grid = GridSpec.log_uniform(math.e, T_max, 200)
sigma, A_star, ledger = build_qpo(A, rho, lam, eta, grid=grid, T_max=T_max)

t = np.asarray(grid.points)
d = A.log_value(t) / np.log(t)
print(f"growth index of A over the grid: min {d.min():.3f}, max {d.max():.3f}")
print(f"sigma over the grid:             min {sigma(t).min():.3f}, max {sigma(t).max():.3f}")
print(f"anchor ledger: {ledger.depth} complete cycles")
for n in range(min(3, ledger.depth)):
    print(f"  n={n + 1}: r={ledger.r[n]:.4g}  r*={ledger.r_star[n]:.4g}  r'={ledger.r_prime[n]:.4g}")

report = verify_qpo(sigma, A_star, A, grid, ledger=ledger)
print(report)
export_sigma_csv(sigma, A_star, A, t, out / "sigma.csv")
print(f"wrote {out / 'sigma.csv'}")
