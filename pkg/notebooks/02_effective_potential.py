"""
The electron-mediated CM-relative potential
===========================================

Closed shells screen the nucleus. We tabulate the resulting potential two
ways and compare them.
"""

# %%
from pathlib import Path

import numpy as np

from sgdl import potentials
from sgdl.svg import line_chart

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

# %% [markdown]
# Neon (Z = 10) on a log grid, closed form against direct quadrature.

# %%
omega = np.geomspace(0.01, 20, 64)
closed = potentials.effective_potential_closed_form(10, omega)
quad = potentials.effective_potential_quadrature(10, omega)
for o, c, q in list(zip(omega, closed, quad))[::8]:
    print(f"omega={o:8.4f}  closed={c:12.6f}  quadrature={q:12.6f}  ratio={c / q:.12f}")

(out / "neon_potential.svg").write_text(
    line_chart(np.log10(omega), quad, "Z = 10 potential (quadrature)", "log10 omega", "V"))

# %% [markdown]
# The ratio is a constant 1/2 for every closed-shell atom. That is the
# two-electrons-per-orbital factor: doubling the closed form makes the
# two agree outright.

# %%
for Z in (2, 10, 28, 60):
    rep = potentials.conformance_27_vs_26(Z)
    print(Z, rep.ratio_mean, rep.ratio_rel_std, rep.exact_match)
print("doubled:", potentials.conformance_27_vs_26(10, spin_factor="doubled").exact_match)

# %% [markdown]
# Near the nucleus the potential grows roughly like Z squared. Far
# outside the cloud it is exactly Z^2 / omega.

# %%
fit = potentials.scaling_fit([2, 10, 28], 0.1)
print("exponent at omega = 0.1:", fit.exponent)
print("exponent at omega = 10: ", potentials.scaling_exponent([2, 10], 10.0))
