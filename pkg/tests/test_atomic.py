from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgdl import atomic
from sgdl.errors import InvalidParameter, NoRelativeSystem

UNIT = atomic.PhysicalConstants(nucleon_mass=1.0)


@pytest.mark.parametrize("A, expected", [(2, 0.5), (1, 0.0), (107, float(Fraction(106, 107)))])
def test_reduced_mass_examples(A, expected):
    assert atomic.reduced_mass(atomic.AtomSpec(1, A, UNIT)) == pytest.approx(expected, abs=1e-15)


def test_reduced_mass_monotone_and_bounded():
    values = [atomic.reduced_mass(atomic.AtomSpec(1, A, UNIT)) for A in range(1, 400)]
    assert np.all(np.diff(values) > 0)
    assert max(values) < 1.0
    assert atomic.reduced_mass(atomic.AtomSpec(1, 10 ** 13, UNIT)) == pytest.approx(1.0, abs=1e-12)


def test_silver_parameters():
    r = atomic.adiabatic_parameters(atomic.AtomSpec(47, 107, atomic.PhysicalConstants.with_mass_ratio(1836.15)))
    # direct arithmetic: 1/(107*1836.15), 107/(106*1836.15), 106/107^2
    assert r.kappa1 == pytest.approx(1 / (107 * 1836.15), rel=1e-12)
    assert r.kappa2 == pytest.approx(107 / (106 * 1836.15), rel=1e-12)
    assert r.kappa3 == pytest.approx(106 / 107 ** 2, rel=1e-12)
    assert f"{r.kappa1:.3g}" == "5.09e-06"
    assert f"{r.kappa2:.3g}" == "0.00055"
    assert f"{r.kappa3:.3g}" == "0.00926"
    assert r.kappa == r.kappa2
    assert r.correction_norm == pytest.approx(r.kappa ** 0.75)


def test_hydrogen_has_no_relative_system():
    with pytest.raises(NoRelativeSystem) as info:
        atomic.adiabatic_parameters(atomic.AtomSpec(1, 1))
    assert info.value.module == "atomic-model"


@given(A=st.integers(2, 300), ratio=st.floats(100.0, 5000.0))
def test_kappa_identities(A, ratio):
    r = atomic.adiabatic_parameters(atomic.AtomSpec(1, A, atomic.PhysicalConstants.with_mass_ratio(ratio)))
    assert r.kappa3 == pytest.approx((A - 1) / A ** 2, rel=1e-12)
    assert r.kappa1 < r.kappa2
    assert r.mu == pytest.approx((1 - 1 / A) * ratio, rel=1e-14)


def test_order_of_magnitude_estimates_hold():
    # the adiabatic estimates hold as order-of-magnitude statements over the table
    for Z, A in atomic.ISOTOPE_TABLE:
        r = atomic.adiabatic_parameters(atomic.AtomSpec(Z, A))
        assert round(np.log10(r.kappa1)) <= -4
        assert round(np.log10(r.kappa2)) <= -3
        assert round(np.log10(r.kappa3)) >= -2


@pytest.mark.parametrize("Z, A", [(0, 1), (3, 2), (1.5, 3)])
def test_atom_spec_validation(Z, A):
    with pytest.raises(InvalidParameter):
        atomic.AtomSpec(Z, A)


def test_constants_must_be_positive():
    with pytest.raises(InvalidParameter):
        atomic.PhysicalConstants(bohr_length=0.0)


def brute_force_kinetic_form(masses, T):
    """Kinetic form in new momenta by finite differences of p^T M^-1 p / 2."""
    K = len(masses)
    def energy(P):
        p = T.T @ P  # old momenta from new ones
        return 0.5 * np.sum(p ** 2 / masses)
    H = np.zeros((K, K))
    h = 1.0
    for i in range(K):
        for j in range(K):
            e = np.zeros((4, K))
            e[0, i] += h; e[0, j] += h
            e[1, i] += h; e[1, j] -= h
            e[2, i] -= h; e[2, j] += h
            e[3, i] -= h; e[3, j] -= h
            H[i, j] = (energy(e[0]) - energy(e[1]) - energy(e[2]) + energy(e[3])) / (4 * h * h)
    return H


@pytest.mark.parametrize("K", [2, 4])
def test_jacobi_separates_equal_masses(K):
    assert atomic.kinetic_separation_check([1.0] * K, "jacobi") <= 1e-12


def test_pairwise_differences_do_not_separate():
    masses = np.ones(3)
    res = atomic.kinetic_separation_check(masses, "pairwise")
    assert res > 0.1
    # independent route: Hessian of the kinetic energy in the new momenta
    H = brute_force_kinetic_form(masses, atomic.coordinate_transform(masses, "pairwise"))
    off = H - np.diag(np.diag(H))
    assert res == pytest.approx(np.linalg.norm(off) / np.linalg.norm(np.diag(H)), rel=1e-10)


@settings(max_examples=50)
@given(st.lists(st.floats(0.01, 100.0), min_size=1, max_size=8))
def test_jacobi_residual_small_for_any_masses(masses):
    assert atomic.kinetic_separation_check(masses, "jacobi") <= 1e-10


def test_kinetic_check_rejects_empty():
    with pytest.raises(InvalidParameter):
        atomic.kinetic_separation_check([], "jacobi")
