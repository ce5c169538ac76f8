"""Relaxation of generic data towards the self-similar profile."""

from teleheat import harness
from teleheat.core import make_params

p = make_params(1, 1, 1, 1, 6.2)
times = [1.5, 2.0, 3.0, 4.0, 6.0]
for init in ("exact", "bump", "two_bumps"):
    rep = harness.run_asymptotics(init, p, times, dx=0.01, seed=0)
    dist = "  ".join(f"{d:.3e}" for d in rep.l1_distances)
    print(f"{init:<10} mass={rep.mass:.6f} drift={rep.relative_mass_drift:.1e}  L1 distance: {dist}")
    for note in rep.notes:
        print("    note:", note)
