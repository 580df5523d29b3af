"""Strips of variable width and sector estimates.

Builds the strip half-width omega from a proximate order l(t), checks
the conformal map against the exact straight-strip case, compares the
mean order L(r) with l(r) and runs the sector lower bound witness for
G(w) = exp(-w), whose log modulus -Re w stays far below r^l(r).

    python demos/03_strip_maps.py
"""

import numpy as np

from qpo.strip import (StripProfile, cartwright_witness, mean_proximate_order_L,
                       oscillating_l, warschawski_map)

flat = StripProfile.constant(np.pi / 2)
u = np.linspace(0.0, 5.0, 6)
err = max(abs(warschawski_map(flat, x, 0.5) - complex(x, 0.5)) for x in u)
print(f"straight strip map minus identity: {err:.2e}")

l = oscillating_l(1.7, 0.3)
for r in (1e3, 1e6, 1e9):
    print(f"r = {r:.0e}: l(r) = {l(r):.4f}, L(r) = {mean_proximate_order_L(l, r):.4f}")


def log_mod_G(w):
    return -np.real(np.asarray(w, dtype=complex))


rep = cartwright_witness(log_mod_G, l, 0.9, r_grid=np.logspace(1, 6, 11), l2=2.0)
print(rep)
