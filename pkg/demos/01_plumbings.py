# %% [markdown]
# # Plumbed 4-manifolds and their forms
#
# Building blocks are written in a small expression language and glued by
# boundary connected sum (`+`).  Each expression has an intersection form,
# an Euler characteristic and, for the families used here, a named boundary.

# %%
from immcalc.plumbing import boundary_descriptor, euler_characteristic, intersection_form, parse_expr

for text in ["P(A,4;2)", "P(A,4;2) + SxS", "P(D,7;2) + SxS", "Estar(5)", "E(-4) + CP2"]:
    e = parse_expr(text)
    m = intersection_form(e)
    print(f"{text:18} chi={euler_characteristic(e):2}  sigma={m.signature:2}  det={m.determinant:3}  "
          f"{m.parity:4}  boundary={boundary_descriptor(e)}")

# %% [markdown]
# The A-chain with all weights 2 has determinant k+1 and bounds a lens space;
# the D-tree always has determinant 4, matching |H_1| of the quotient of S^3
# by a dicyclic group.

# %%
print(intersection_form(parse_expr("P(D,5;2)")))
print("SNF:", intersection_form(parse_expr("P(D,6;2)")).smith)

# %% [markdown]
# Arbitrary plumbing graphs use the `G{...}` literal: vertices with weights,
# then edges.

# %%
e = parse_expr("G{a:-2,b:-3,c:-2;a-b,b-c}")
print(e, intersection_form(e).invariants(), boundary_descriptor(e))
