"""
Van der Pol: implicit schemes and two-point extrapolation
=========================================================

For the noisy van der Pol oscillator there is no closed form, so the
reference is RK4 on the coefficient ODEs truncated to a 15 x 15 box.
"""

from sdemoments import (
    EstimatePair,
    OdeOracleConfig,
    RunPlan,
    compile_generator,
    extrapolate1,
    extrapolate2,
    ode_oracle,
    preset,
    run,
)

model, origin, _ = preset("vdp")  # epsilon=1, nu11=nu22=0.5, x_ini=(0.5, 1.0)
g = compile_generator(model, origin)
T, alpha = 0.1, (1, 1)

exact = ode_oracle(g, alpha, OdeOracleConfig(T=T, cutoff=15, dt=1e-6))
print(f"reference E[(X1-0.5)(X2-1)] at T={T}: {exact:.6e}")

# extrapolating from M-1 and M removes the leading 1/M (or 1/M^2) error term
for method, extrap in (("implicit1", extrapolate1), ("implicit2", extrapolate2)):
    print(f"\n{method}")
    print("   M      estimate    |error|   |extrap. error|")
    for M in (10, 20, 30):
        lo = run(g, RunPlan(T, M - 1, alpha, method))
        hi = run(g, RunPlan(T, M, alpha, method))
        better = extrap(EstimatePair(lo, hi, M - 1, M))
        print(f"{M:4d}  {hi:.6e}  {abs(hi - exact):9.2e}  {abs(better - exact):9.2e}")
