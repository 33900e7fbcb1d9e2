"""Constant-coefficient operators: symbols, annihilation, algebra.

Walks through symbol evaluation, grid application, the vector-space property
of annihilated fields under operator composition, and the measure of symbol
zero sets.
"""

import numpy as np

import roitomo as rt
from roitomo.diffops import compose, laplacian_power, partial_op, symbol_eval

grid = rt.Grid(2, 96, 1.0)

lap = laplacian_power(2, 1)
print(f"Laplacian symbol at (3, 4): {symbol_eval(lap, np.array([3.0, 4.0])).real:.1f}")

quad = rt.PhantomSpec.patch(rule="polynomial", degree=2, plateau_radius=0.45,
                            support_radius=0.7, v_radius=0.25)
harm = rt.PhantomSpec.patch(rule="harmonic", degree=3, plateau_radius=0.45,
                            support_radius=0.7, v_radius=0.25)
f_quad = rt.sample_phantom(quad, grid)
f_harm = rt.sample_phantom(harm, grid)
region = quad.region(grid)

for name, field, spec in [("quadratic", f_quad, quad), ("harmonic", f_harm, harm)]:
    ok, res = rt.is_admissible(field, spec.annihilator(2), region)
    print(f"{name:9s} patch vs own annihilator: admissible={ok} residual={res:.2e}")

gauss = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=0.2), grid)
ok, res = rt.is_admissible(gauss, lap, region)
print(f"gaussian  vs Laplacian:              admissible={ok} residual={res:.2e}")

# sums of annihilated fields are annihilated by the composed operator
combo = f_quad + 0.7 * f_harm
composed = compose(quad.annihilator(2), harm.annihilator(2))
ok, res = rt.is_admissible(combo, composed, region)
print(f"sum vs composed annihilator (order {composed.order}): "
      f"admissible={ok} residual={res:.2e}")

# symbol zero sets have vanishing measure
for op, label in [(partial_op(2, 0), "d/dx"), (lap, "Laplacian"),
                  (rt.unit_op(2), "identity")]:
    frac = rt.zero_set_fraction(op, 1_000_000, eps=1e-6)
    print(f"zero-set fraction of {label:9s} at eps 1e-6: {frac:.2e}")
