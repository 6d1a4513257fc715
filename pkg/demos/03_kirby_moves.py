# %% [markdown]
# # Kirby moves on linking matrices
#
# A handle slide of component i over component j replaces the framing
# M_ii by M_ii + 2 eps M_ij + M_jj.  Blow-ups add a +-1 framed unknot.

# %%
from pathlib import Path

from immcalc.forms import HYPERBOLIC
from immcalc.kirby import KirbyState, MoveScript, blowdown, run_script, slide

s = slide(KirbyState(HYPERBOLIC), 1, 2, +1)
print(s.form)

# %% [markdown]
# Two components each passing once through a +1-framed unknot: sliding both
# off it lowers each framing by one, after which the unknot blows down.

# %%
s = KirbyState.start("[[2,1,1],[1,3,1],[1,1,1]]")
s = blowdown(slide(slide(s, 1, 3, -1), 2, 3, -1), 3)
print(s.form, dict(s.stabilizations))

# %% [markdown]
# Move scripts replay a sequence and check the final matrix, up to reordering.

# %%
corpus = Path(__file__).resolve().parent.parent / "corpus"
for path in sorted(corpus.glob("*.ks")):
    res = run_script(MoveScript.load(path))
    print(f"{path.name:42} {'pass' if res.passed else 'FAIL: ' + res.reason}")
