# %% [markdown]
# # Dicyclic groups
#
# Elements are a^k x^e with k mod 2n.  The same group is realised inside the
# unit quaternions; both models agree on every product.

# %%
from immcalc.dicyclic import abelianization, elements, element_order, gen_a, gen_x, group_report, quaternion_model_agrees
from immcalc.forms import finite_abelian_label

n = 3
a, x = gen_a(n), gen_x(n)
print("x^2 =", x * x, " a^n =", a ** n, " x a x^-1 =", x * a * x ** -1)
print("orders:", sorted({element_order(g) for g in elements(n)}))
print("quaternion model agrees:", quaternion_model_agrees(n))

# %%
for n in range(1, 9):
    r = group_report(n)
    print(f"Dic{n}: order {r['order']:2}, abelianization {finite_abelian_label(abelianization(n))}")
