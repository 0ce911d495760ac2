"""The spring-pendulum instance: build, iterate, and report honestly.

The existence theory guarantees a solution but offers no algorithm, and
for these desk-scale parameters the picture is genuinely hard: damped
Picard and Anderson mixing keep the iterates finite but the residual
plateaus around 1 instead of contracting.  Non-convergence is a reported
outcome with diagnostics, not an error; the lowest-residual iterate is
returned.  (gravity dominates the right-hand side near t0 = 1; the jump
maps themselves are mild.)
"""

import numpy as np

from impulsebvp import (QuadratureConfig, SolverConfig, solve,
                        validate_problem, verify_residuals)
from impulsebvp.pendulum import PendulumParams, build_pendulum_problem

pp = PendulumParams()  # m=1, k=1, g=9.8, l0=1, alpha=0.1, B1=B2=0.5, t0=1
p = build_pendulum_problem(pp)

report = validate_problem(p, 40.0)
print(f"validation passed: {report.passed}")
print(f"impulse times below 40: "
      f"{report.entries('u_schedule')[0]['details']['count_below_horizon']} "
      f"(t_k = k; the point at t0 = 1 is outside the working domain)")

qc = QuadratureConfig(horizon=40.0, mesh_spacing=0.02)
for damping, depth in ((0.5, 0), (0.5, 4)):
    sc = SolverConfig(max_iter=40, tol=1e-8, damping=damping,
                      anderson_depth=depth)
    pair, diag = solve(p, sc, qc)
    h = diag.residual_history
    print(f"\ndamping={damping}, anderson={depth}: converged={diag.converged}, "
          f"best residual {min(h):.3e} at iteration {int(np.argmin(h)) + 1}")
    print(f"  first/last residuals: {h[0]:.2e} ... {h[-1]:.2e}")

rr = verify_residuals(p, pair)
print(f"\nresiduals of the best iterate (not a solution, diagnostics only):")
print(f"  ode: {rr.ode_residual_sup}, jumps: {max(rr.jump_residual_sup):.2e}")
print(f"  length range on [1, 40]: [{pair.u.values.min():.3f}, "
      f"{pair.u.values.max():.3f}]")
