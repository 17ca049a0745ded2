"""
Mass ratios and the adiabatic cut
=================================

How light is the electron compared with the nucleus as a whole, and with
the internal (relative) motion of the nucleons?
"""

# %%
from sgdl import atomic
from sgdl.errors import NoRelativeSystem

# %% [markdown]
# Silver-107 with the textbook mass ratio of 1836.15:

# %%
silver = atomic.AtomSpec(47, 107, atomic.PhysicalConstants.with_mass_ratio(1836.15))
r = atomic.adiabatic_parameters(silver)
print(f"kappa1 = {r.kappa1:.3g}   kappa2 = {r.kappa2:.3g}   kappa3 = {r.kappa3:.3g}")
print(f"correction norm kappa^(3/4) = {r.correction_norm:.3g}")

# %% [markdown]
# Across the isotope table the electron ratios stay small. The relative/CM
# ratio shrinks like 1/A, so the heaviest nuclei drop below one percent.

# %%
print(" Z    A     kappa1     kappa2     kappa3")
for Z, A in atomic.ISOTOPE_TABLE:
    r = atomic.adiabatic_parameters(atomic.AtomSpec(Z, A))
    print(f"{Z:3d} {A:4d}  {r.kappa1:9.3e}  {r.kappa2:9.3e}  {r.kappa3:9.3e}")

# %% [markdown]
# Hydrogen has a single nucleon and so nothing internal to act as an
# environment.

# %%
try:
    atomic.adiabatic_parameters(atomic.AtomSpec(1, 1))
except NoRelativeSystem as exc:
    print(exc.to_dict())

# %% [markdown]
# Jacobi coordinates split the kinetic energy exactly; naive pairwise
# differences leave cross terms behind.

# %%
masses = [1.0, 1.0, 1.0]
print("jacobi  ", atomic.kinetic_separation_check(masses, "jacobi"))
print("pairwise", atomic.kinetic_separation_check(masses, "pairwise"))
