"""
Erasure and the pointer sieve
=============================

Measuring Sx after the run erases which-path information carried by the
spin. Interference then returns, unless the recorder kept its own copy.
"""

# %%
from sgdl import dynamics

# %%
free = dynamics.erasure_scenario()
ham = dynamics.HamiltonianSpec(environment=dynamics.EnvironmentSpec("linear_recorder"))
recorded = dynamics.erasure_scenario(ham=ham)
print("no records:  ", free.to_dict())
print("with records:", recorded.to_dict())

# %% [markdown]
# A recorder prepared in a shift-invariant state stores nothing, and the
# fringes survive the coupling.

# %%
blind = dynamics.HamiltonianSpec(environment=dynamics.EnvironmentSpec(
    "linear_recorder", preparation="shift_invariant"))
print("shift invariant:", dynamics.erasure_scenario(ham=blind).visibility_conditioned)

# %% [markdown]
# Which CM states does the recorder disturb least? Rank three candidates
# by the linear entropy they pick up.

# %%
env = dynamics.EnvironmentSpec("linear_recorder", coupling=dynamics.SIEVE_COUPLING)
ranked = dynamics.pointer_sieve(dynamics.standard_candidates(dynamics.SIEVE_GRID), env,
                                dynamics.SIEVE_TIME)
for entry in ranked:
    print(f"{entry.label:22s} {entry.production:.4f}")
