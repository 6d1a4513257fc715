# %% [markdown]
# # Removing rank-2 points from z -> z^2
#
# Adding rho(|z|^2) z to z^2, with rho a bump equal to 1 near the origin and
# 0 from |z|^2 = 1/2 on, leaves a map whose Jacobian never vanishes.

# %%
from fractions import Fraction

import numpy as np

from immcalc.singularities import BumpFunction, eliminate_symbolically, jacobian_entries, verify_no_rank2

bump = BumpFunction(Fraction(1, 20))
print("J at origin:\n", jacobian_entries(0.0, 0.0, bump))
t = np.linspace(0, 0.6, 7)
print("rho:", np.round(bump(t), 4))

# %%
for c in (Fraction(1, 100), Fraction(1, 20), Fraction(1, 10)):
    for kind in ("exp", "exp2"):
        r = verify_no_rank2(256, BumpFunction(c, kind), 1e-6, symbolic=False)
        print(f"c={c!s:6} {kind:4}  ok={r.ok}  min max|J|={r.min_entry_max:.4f}  at {r.worst}")

# %%
print(eliminate_symbolically())
