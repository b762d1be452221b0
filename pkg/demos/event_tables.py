"""
Event tables, numeric and symbolic
==================================

The generator of a polynomial SDE becomes a short list of lattice moves,
each with a polynomial weight gamma(n) and a displacement v.
"""

import sympy as sp

from sdemoments import compile_generator, preset
from sdemoments.models import VanDerPolParams, build_van_der_pol

model, origin, _ = preset("ou")
print("OU around x_ini = 1")
print(compile_generator(model, origin).format_table())

model, origin, _ = preset("vdp")
print("\nvan der Pol at the benchmark parameters")
print(compile_generator(model, origin).format_table())

# coefficients are not required to be floats: with sympy symbols the same
# compiler prints the table with the parameters left free
eps, nu11, nu22, a, b = sp.symbols("epsilon nu11 nu22 a b", positive=True)
g = compile_generator(build_van_der_pol(VanDerPolParams(eps, nu11, nu22, a, b)), (a, b))
print("\nvan der Pol, symbolic, shifted to (a, b)")
for ev in g.events:
    weight = sum(c * sp.Symbol("n1") ** k[0] * sp.Symbol("n2") ** k[1] for k, c in ev.gamma.terms.items())
    print(f"  v = {ev.shift!s:9}  gamma = {sp.factor(weight)}")
