"""
Convergence of the four time-stepping schemes on the OU process
================================================================

dX = -gamma X dt + sigma dW has closed-form moments, so it is a clean place
to watch the lattice propagator converge as the number of steps M grows.
"""

import numpy as np

from sdemoments import Method, RunPlan, compile_generator, preset, run
from sdemoments.oracle import ou_closed_form

# gamma=1, sigma=0.5, started at x=1; all moments are taken around x=1
model, origin, params = preset("ou")
g = compile_generator(model, origin)
print(g.format_table())
print()

T = 1.0
Ms = [8, 16, 32, 64, 128]

for order in (1, 2):
    exact = ou_closed_form(params.gamma, params.sigma, params.x_ini, T, order)
    print(f"E[(X_T - 1)^{order}] = {exact:.10f}")
    print("method      " + "".join(f"{M:>11d}" for M in Ms) + "    slope")
    for method in Method:
        errors = np.array([abs(run(g, RunPlan(T, M, (order,), method)) - exact) for M in Ms])
        # slope of log error against log M; about 1 or about 2
        slope = -np.polyfit(np.log10(Ms), np.log10(errors), 1)[0]
        print(f"{method.value:<12}" + "".join(f"{e:11.2e}" for e in errors) + f"{slope:9.2f}")
    print()

# the zeroth moment is exactly one for every scheme, whatever M is
print([run(g, RunPlan(T, 7, (0,), m)) for m in Method])
