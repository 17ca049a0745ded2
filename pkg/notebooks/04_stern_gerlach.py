"""
Stern-Gerlach with and without an internal recorder
===================================================

Without an environment the spin entangles with the CM packet and the
two branches separate, but the overall state of spin and CM stays pure.
Adding a recorder that tracks which way the atom went makes the CM+S
state mixed.
"""

# %%
from pathlib import Path

from sgdl import dynamics, harness
from sgdl.svg import write_series_charts

out = Path(__file__).with_name("output")

# %% [markdown]
# Default grid: 8192 points on [-256, 256], 2000 steps of 0.005.

# %%
free = dynamics.sg_scenario()
for key in ("final_spin_entropy", "final_separation_widths", "r_fidelity_initial", "cm_purity"):
    print(f"{key:26s} {free.summary[key]:.6g}")

# %%
ham = dynamics.HamiltonianSpec(environment=dynamics.EnvironmentSpec("linear_recorder"))
recorded = dynamics.sg_scenario(ham=ham)
for key in ("coupling", "record_overlap", "offdiag_norm", "cm_purity"):
    print(f"{key:26s} {recorded.summary[key]:.6g}")

# %%
harness.write_run_csv(recorded, out / "sg_recorder.csv")
for path in write_series_charts(recorded.series(), out, "sg_recorder"):
    print("wrote", path)
