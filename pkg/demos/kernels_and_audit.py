"""Memory kernels: reductions to Fourier and Cattaneo, and the local-law audit."""

import numpy as np

from teleheat import analytic, kernels
from teleheat.core import Field, grid_linspace, make_params

grid = grid_linspace(-1.0, 1.0, 41)
times = np.arange(0.0, 2.0 + 5e-4, 1e-3)
grad = np.sin(times)[:, None] * np.cos(grid.x)[None, :]
rec = kernels.HistoryRecord(times, grad, grid)

q_dirac = kernels.flux_history(rec, kernels.Dirac(1.0), 2.0)
print("Dirac kernel equals Fourier flux:", np.array_equal(q_dirac.values, -grad[-1]))

q = Field(grid, 0.0, grid.zeros())
for n in range(1, times.size):
    q = kernels.cattaneo_flux_step(q, Field(grid, times[n], grad[n]), 1e-3, 1.0, 1.0)
q_exp = kernels.flux_history(rec, kernels.Exponential(1.0, 1.0), 2.0)
print("exponential kernel vs Cattaneo update:", np.max(np.abs(q.values - q_exp.values)))

# audit on the exact self-similar solution, history sampled from t = 0.5
p = make_params(1, 1, 1, 1, 6.2)
ht = np.linspace(0.5, 2.0, 1501)
hist = kernels.HistoryRecord(ht, np.array([analytic.self_similar_Tx(grid.x, s, p) for s in ht]), grid)
audit = kernels.mean_value_audit(hist, p, 1.5)
print("local-law audit gap at t=1.5:", audit.gap)
