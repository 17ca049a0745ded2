import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import simpson

from sgdl import potentials as pot
from sgdl.errors import (DegenerateFit, EmptyGrid, NonPositiveDistance, NotClosedShell,
                         QuadratureNonConvergence)


def helium_like(Z, omega, k=1.0):
    """Two 1s electrons, each screening as 1/omega * (1 - e^{-2Z omega}(1 + Z omega))."""
    omega = np.asarray(omega, dtype=float)
    per_electron = (1.0 - np.exp(-2 * Z * omega) * (1 + Z * omega)) / omega
    return k * Z * 2 * per_electron


def test_yukawa_values():
    p = pot.YukawaParams(gamma_sq=2.0, range=0.5)
    assert pot.yukawa(0.5, p) == pytest.approx(-2.0 * math.exp(-1) / 0.5, rel=1e-15)
    r = np.array([0.1, 1.0, 3.0])
    assert np.all(np.diff(pot.yukawa(r, p)) > 0)
    with pytest.raises(NonPositiveDistance):
        pot.yukawa(0.0, p)


@pytest.mark.parametrize("Z, shells", [
    (2, ((1, 2),)),
    (10, ((1, 2), (2, 8))),
    (28, ((1, 2), (2, 8), (3, 18))),
    (60, ((1, 2), (2, 8), (3, 18), (4, 32))),
])
def test_closed_shell_configs(Z, shells):
    cfg = pot.closed_shell_config(Z)
    assert cfg.shells == shells and cfg.Z == Z


@pytest.mark.parametrize("Z", [1, 3, 11, 18, 29])
def test_open_shells_rejected(Z):
    with pytest.raises(NotClosedShell):
        pot.effective_potential_closed_form(Z, 1.0)


def test_first_shell_coefficients_exact():
    assert pot.shell_terms(1) == ((2, Fraction(1), Fraction(1, 2)),)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_shell_coefficient_sums(n):
    # far field: every spatial orbital counts once, n^2 in total;
    # at omega = 0 the shell gives (2Z/n) * sum c(N-1)! = n^2 <1/r> / 1 with <1/r> = Z/n^2
    terms = pot.shell_terms(n)
    assert sum(cN for _, cN, _ in terms) == n * n
    assert sum(cN1 for _, _, cN1 in terms) == Fraction(n, 2)


def test_helium_closed_form_hand_collapse():
    omega = np.geomspace(0.01, 30, 25)
    # the closed form counts one electron per orbital, the analytic pair two
    assert np.allclose(pot.effective_potential_closed_form(2, omega), 0.5 * helium_like(2, omega),
                       rtol=1e-13, atol=0)
    assert pot.effective_potential_closed_form(2, 1.0) == pytest.approx(2 * (1 - 3 * math.exp(-4)), rel=1e-14)


def test_quadrature_matches_analytic_helium():
    omega = pot.default_conformance_grid()
    got = pot.effective_potential_quadrature(2, omega)
    assert np.max(np.abs(got / helium_like(2, omega) - 1)) <= 1e-8


def test_quadrature_neon_against_explicit_orbitals():
    # hand-written 1s, 2s, 2p densities, Simpson on grids split at omega
    Z = 10
    dens = (
        (2, lambda r: 4 * Z ** 3 * np.exp(-2 * Z * r)),
        (2, lambda r: 4 * (Z / 2) ** 3 * (1 - Z * r / 2) ** 2 * np.exp(-Z * r)),
        (6, lambda r: (Z / 2) ** 3 / 3 * (Z * r) ** 2 * np.exp(-Z * r)),
    )
    for omega in (0.05, 0.3, 1.0):
        inner = np.linspace(0, omega, 20001)
        outer = np.linspace(omega, omega + 15, 200001)
        expected = Z * sum(occ * (simpson(d(inner) * inner ** 2, x=inner) / omega
                                  + simpson(d(outer) * outer, x=outer))
                           for occ, d in dens)
        assert pot.effective_potential_quadrature(Z, omega) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("Z", [2, 10, 28])
def test_far_field_is_bare_coulomb(Z):
    omega = 50.0
    assert pot.effective_potential_quadrature(Z, omega) == pytest.approx(Z * Z / omega, rel=1e-4)


@pytest.mark.parametrize("method", ["closed-form", "quadrature"])
def test_potential_decreases_with_distance(method):
    rp = pot.evaluate(10, np.geomspace(0.01, 20, 40), method)
    assert np.all(np.diff(rp.values) < 0)


def test_origin_limit_is_continuous():
    for Z in (2, 10, 28):
        v0 = pot.effective_potential_closed_form(Z, 0.0)
        assert pot.effective_potential_closed_form(Z, 1e-9) == pytest.approx(v0, rel=1e-6)
        assert pot.effective_potential_quadrature(Z, 1e-9) == pytest.approx(2 * v0, rel=1e-6)
    assert pot.effective_potential_closed_form(10, 0.0) == pytest.approx(200.0, rel=1e-14)


@pytest.mark.parametrize("Z", [2, 10, 28])
def test_conformance_finds_constant_half(Z):
    rep = pot.conformance_27_vs_26(Z)
    assert rep.structural_match and rep.ratio_rel_std <= 1e-6
    assert rep.ratio_mean == pytest.approx(0.5, abs=1e-9)
    assert rep.exact_match is False
    assert "spin" in rep.notes
    doc = rep.to_dict()
    assert len(doc["points"]) == 32 and doc["grid"]["points"] == 32


def test_doubled_spin_factor_restores_exact_match():
    rep = pot.conformance_27_vs_26(10, spin_factor="doubled")
    assert rep.exact_match and abs(rep.ratio_mean - 1) <= 1e-9


def test_conformance_empty_grid():
    with pytest.raises(EmptyGrid) as info:
        pot.conformance_27_vs_26(2, omega_grid=[])
    assert info.value.module == "potentials"


def test_scaling_exponent_in_range():
    fit = pot.scaling_fit([2, 10, 28], 0.1)
    assert 1.5 <= fit.exponent <= 2.5
    # far outside the cloud the potential is Z^2 / omega exactly
    assert pot.scaling_exponent([2, 10], 10.0) == pytest.approx(2.0, abs=1e-4)


@pytest.mark.parametrize("zs", [[2, 2], [10]])
def test_scaling_degenerate(zs):
    with pytest.raises(DegenerateFit):
        pot.scaling_fit(zs, 0.1)


def test_quadrature_reports_nonconvergence(monkeypatch):
    monkeypatch.setattr(pot, "QUAD_MAX_REL_ERROR", 0.0)
    with pytest.raises(QuadratureNonConvergence):
        pot.effective_potential_quadrature(10, 0.5)
