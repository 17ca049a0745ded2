"""Atomic model: constants, reduced masses and adiabatic mass ratios.

Units are atomic-style: electron mass, Bohr-like length and Coulomb
constant are all 1 unless overridden.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateTransform, InvalidParameter, NoRelativeSystem, provenance

#: proton/electron mass ratio (CODATA 2018), used for every nucleon
NUCLEON_ELECTRON_MASS_RATIO = 1836.15267343


@dataclass(frozen=True)
class PhysicalConstants:
    electron_mass: float = 1.0
    nucleon_mass: float = NUCLEON_ELECTRON_MASS_RATIO
    bohr_length: float = 1.0
    coulomb_constant: float = 1.0
    magneton: float = 0.5  # Bohr magneton, e*hbar/(2 m_e) in atomic units
    field_gradient: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise InvalidParameter(f"{name} must be strictly positive, got {value}")

    @classmethod
    def with_mass_ratio(cls, mass_ratio: float) -> "PhysicalConstants":
        return cls(nucleon_mass=mass_ratio * cls.electron_mass)


@dataclass(frozen=True)
class AtomSpec:
    Z: int
    A: int
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if int(self.Z) != self.Z or self.Z < 1:
            raise InvalidParameter(f"Z must be a positive integer, got {self.Z}")
        if int(self.A) != self.A or self.A < self.Z:
            raise InvalidParameter(f"A must be an integer >= Z, got A={self.A}, Z={self.Z}")

    @property
    def total_mass(self) -> float:
        return self.A * self.constants.nucleon_mass


@dataclass(frozen=True)
class AdiabaticReport:
    mu: float
    kappa1: float
    kappa2: float
    kappa3: float
    kappa: float
    correction_norm: float

    def to_dict(self) -> dict:
        return asdict(self)


class CoordinateScheme(str, enum.Enum):
    JACOBI = "jacobi"
    PAIRWISE_DIFFERENCE = "pairwise"


@provenance("atomic-model", "reduced_mass")
def reduced_mass(spec: AtomSpec) -> float:
    """Mass shared by every relative particle of the nucleus, ``(1 - 1/A) m``.

    Hydrogen (A = 1) gives exactly 0.
    """
    return (1.0 - 1.0 / spec.A) * spec.constants.nucleon_mass


@provenance("atomic-model", "adiabatic_parameters")
def adiabatic_parameters(spec: AtomSpec) -> AdiabaticReport:
    """Electron/CM, electron/relative and relative/CM mass ratios.

    Raises
    ------
    NoRelativeSystem
        For A = 1, where the nucleus has no relative degrees of freedom.
    """
    if spec.A < 2:
        raise NoRelativeSystem(
            f"A={spec.A}: a single nucleon has no relative system")
    m_e = spec.constants.electron_mass
    M = spec.total_mass
    mu = reduced_mass(spec)
    k1 = m_e / M
    k2 = m_e / mu
    k3 = mu / M
    kappa = max(k1, k2)
    return AdiabaticReport(mu=mu, kappa1=k1, kappa2=k2, kappa3=k3,
                           kappa=kappa, correction_norm=kappa ** 0.75)


def coordinate_transform(masses, scheme: CoordinateScheme | str) -> np.ndarray:
    """Rows map particle positions to (CM, relative_1, ..., relative_{K-1})."""
    m = np.asarray(masses, dtype=float)
    K = m.size
    T = np.zeros((K, K))
    T[0] = m / m.sum()
    scheme = CoordinateScheme(scheme)
    for j in range(1, K):
        if scheme is CoordinateScheme.JACOBI:
            # centre of mass of the first j particles minus particle j+1
            T[j, :j] = m[:j] / m[:j].sum()
            T[j, j] = -1.0
        else:
            T[j, j - 1] = 1.0
            T[j, j] = -1.0
    return T


@provenance("atomic-model", "kinetic_separation_check")
def kinetic_separation_check(masses, scheme: CoordinateScheme | str = CoordinateScheme.JACOBI) -> float:
    """Relative off-diagonal weight of the kinetic form in new momenta.

    Returns ``||offdiag(Q)||_F / ||diag(Q)||`` with ``Q = T M^-1 T^T``;
    zero means the kinetic energy splits into independent CM and relative
    terms.
    """
    m = np.asarray(masses, dtype=float)
    if m.ndim != 1 or m.size == 0:
        raise InvalidParameter("masses must be a nonempty 1-D sequence")
    if np.any(m <= 0):
        raise InvalidParameter("masses must be strictly positive")
    T = coordinate_transform(m, scheme)
    if np.linalg.cond(T) > 1e12:
        raise DegenerateTransform("coordinate transform is singular")
    Q = T @ np.diag(1.0 / m) @ T.T
    diag = np.diag(Q)
    off = Q - np.diag(diag)
    return float(np.linalg.norm(off) / np.linalg.norm(diag))


#: (Z, A) of the most abundant isotope for a spread of elements up to uranium
ISOTOPE_TABLE: tuple[tuple[int, int], ...] = (
    (2, 4), (10, 20), (26, 56), (47, 107), (79, 197), (92, 238),
)
