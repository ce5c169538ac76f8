"""Frozen-time plane-wave analysis: phase velocity and attenuation length."""

import numpy as np

from teleheat import analytic
from teleheat.core import params_from_eps

p = params_from_eps(1.0, 6.2)
print(f"{'t':>10} {'v_p':>12} {'alpha':>12} {'closed v_p':>12}")
for t in np.geomspace(0.1, 1e12, 15):
    s = analytic.dispersion(1.0, t, p)
    v_closed, _ = analytic.printed_dispersion(1.0, t, p)
    print(f"{t:10.3g} {s.v_p:12.8f} {s.alpha_tilde:12.4g} {v_closed:12.8f}")

# away from unit frequency the closed formula drifts from the exact root
for w in (0.5, 1.0, 2.0):
    print(f"w={w}: exact v_p {analytic.dispersion(w, 3.0, p).v_p:.6f}, closed {analytic.printed_dispersion(w, 3.0, p)[0]:.6f}")
