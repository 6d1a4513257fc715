# %% [markdown]
# # Deciding congruence of integer forms
#
# `congruent` first compares rank, signature, determinant, parity and the
# Smith normal form.  If these agree it looks for an explicit unimodular U
# with U^T M1 U = M2 and re-checks it before answering "yes".

# %%
from immcalc.forms import HYPERBOLIC, IntegerSymmetricForm, congruent

I = IntegerSymmetricForm.diagonal
trade = congruent(I([1, 1, -1]), HYPERBOLIC + I([1]))
print(trade.verdict, trade.certificate)

# %% [markdown]
# Parity is a genuine obstruction: an even form is never congruent to an odd one.

# %%
res = congruent(I([2]) + HYPERBOLIC, I([-2, 1, 1]))
print(res.verdict, "--", res.witness)

# %% [markdown]
# Larger instances are handled by splitting off unit vectors and hyperbolic
# planes until a small residual block remains.

# %%
from immcalc.kirby import identity_sides

lhs, rhs, ltxt, rtxt = identity_sides("D-blowdown", 6)
res = congruent(lhs, rhs)
print(f"{ltxt}  ~  {rtxt}: {res.verdict} via {res.detail.get('route')}")
