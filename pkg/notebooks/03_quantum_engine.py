"""
A short tour of the state engine
================================
"""

# %%
import numpy as np

from sgdl import engine as qe

# %% [markdown]
# Labelled tensor products, partial traces and entropies.

# %%
a = qe.spin("up", "A")
b = qe.spin("down", "B")
pair = qe.tensor(a, b)
print(pair, pair.names, pair.dims)

p = 0.25
psi = qe.QState([qe.SpaceLabel("A", 2), qe.SpaceLabel("B", 2)], "pure",
                [np.sqrt(p), 0, 0, np.sqrt(1 - p)])
rho_a = qe.partial_trace(psi, ["A"])
print("purity", qe.purity(rho_a), "entropy", qe.vn_entropy(rho_a))

# %% [markdown]
# Writing the spin in the Sx basis shows what an Sx measurement does to
# two branches that carry records m and p.

# %%
m, pp = qe.UP, qe.DOWN
lhs = qe.SQRT_HALF * (np.kron(qe.UP, m) + np.kron(qe.DOWN, pp))
rhs = 0.5 * (np.kron(qe.RIGHT, m + pp) + np.kron(qe.LEFT, m - pp))
print("max deviation", np.max(np.abs(lhs - rhs)))

# %% [markdown]
# Visibility of a two-branch state equals the overlap of the records.

# %%
for overlap in (1.0, 0.6, 0.0):
    r2 = np.array([overlap, np.sqrt(1 - overlap ** 2)])
    state = qe.QState([qe.SpaceLabel("CM", 2), qe.SpaceLabel("R", 2)], "pure",
                      qe.SQRT_HALF * (np.kron([1, 0], [1, 0]) + np.kron([0, 1], r2)))
    print(overlap, qe.coherence_visibility(state, ([1, 0], [0, 1]), "CM"))
