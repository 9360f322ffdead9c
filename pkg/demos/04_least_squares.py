"""Least-squares mode: inconsistent data, diminishing gain.

The five-node least-squares benchmark has no exact solution, so the solver
runs with a diminishing gain gamma(k) = (k0/(k+k0))^delta and a reference
scale s(k) = s_r * gamma(k). The demo shows convergence to the unique
least-squares solution and the data-rate inertness of the trajectory.
"""

import numpy as np

from quantnet import (GammaSchedule, LSConfig, builtin_graph, builtin_problem,
                      classify, run_ls, traces_dynamics_equal)

p = builtin_problem("ex4")
g = builtin_graph()
cls = classify(p)
print(f"classification  = {cls.kind}")
print(f"target solution = ({cls.solution[0]:.5f}, {cls.solution[1]:.5f})")
print(f"residual norm   = {cls.residual_norm:.4f}  (genuinely inconsistent)")

sched = GammaSchedule(k0=26.0, delta=0.85)
traces = {K: run_ls(p, g, LSConfig(h=0.0853, K=K, s_r=0.82, gamma=sched,
                                   max_rounds=20000))
          for K in (300, 900, 1800)}

tr = traces[900]
final = np.abs(tr.x_final - cls.solution[None, :]).max()
print(f"\nK=900 run: final max_i ||x_i - y_ls||_inf = {final:.4e}")
tail = tr.ratio_err_gamma[10000:]
print(f"err/gamma ratio over the last half: sup = {tail.max():.3f}, "
      f"median = {np.median(tail):.3f} (bounded, as the rate bound predicts)")

same = all(traces_dynamics_equal(traces[900], t) for t in traces.values())
print(f"K in {{300, 900, 1800}} give identical dynamics: {same}")
