# %% [markdown]
# # Smale invariants of the two immersion families
#
# Each pipeline assembles the signature, the rank-2 point count and the
# normal degree of a singular Seifert surface, applies the Smale formula,
# and then corrects by connected sums with a fixed immersion.

# %%
from immcalc.smale import pipeline_f, pipeline_g

res = pipeline_g(3)
for step in res.ledger.trace:
    print(f"{step['step']:55} {str(step['value']):>10}   {step['why']}")

# %%
print(" n   Omega(f_n)   class  gen   Omega(g_n)   class  gen")
for n in range(1, 13):
    f, g = pipeline_f(n), pipeline_g(n)
    print(f"{n:2}   {str(f.omega):10} {f.bordism:5}  {f.generator!s:5} {str(g.omega):11} {g.bordism:5}  {g.generator!s:5}")
