"""Nuclear and electron-mediated potentials.

Two independent routes to the effective CM-relative interaction of a
closed-shell atom are provided:

* :func:`effective_potential_closed_form` sums the finite series over
  shells, orbital momenta and Laguerre expansion indices, with every
  combinatorial prefactor held as an exact rational number until the
  final float conversion;
* :func:`effective_potential_quadrature` integrates the electron charge
  density of hydrogenic orbitals directly (spherical shell theorem, one
  radial integral split at the probe radius).

Lengths are in units of ``a_mu`` unless given explicitly; energies carry
the Coulomb constant ``k``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import (DegenerateFit, EmptyGrid, InvalidParameter, NonPositiveDistance,
                     NotClosedShell, QuadratureNonConvergence, provenance)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200
#: relative error budget before a quadrature result is rejected
QUAD_MAX_REL_ERROR = 1e-9


class Method(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"


class SpinFactor(str, enum.Enum):
    LITERAL = "literal"
    DOUBLED = "doubled"


@dataclass(frozen=True)
class YukawaParams:
    gamma_sq: float
    range: float

    def __post_init__(self):
        if not self.range > 0:
            raise InvalidParameter("Yukawa range must be > 0")
        if self.gamma_sq < 0:
            raise InvalidParameter("gamma_sq must be >= 0")


@dataclass(frozen=True)
class ShellConfig:
    shells: tuple[tuple[int, int], ...]

    @property
    def Z(self) -> int:
        return sum(occ for _, occ in self.shells)

    @property
    def principal_numbers(self) -> list[int]:
        return [n for n, _ in self.shells]


@dataclass
class RadialPotential:
    method: Method
    Z: int
    a_mu: float
    omega: np.ndarray
    values: np.ndarray
    spin_factor: SpinFactor | None = None

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.omega < 0) or np.any(np.diff(self.omega) <= 0):
            raise InvalidParameter("omega samples must be nonnegative and strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameter("potential samples must be finite")

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.omega.tolist(), self.values.tolist()))


@dataclass
class ConformanceReport:
    Z: int
    omega: np.ndarray
    v27: np.ndarray
    v26: np.ndarray
    ratio: np.ndarray
    ratio_mean: float
    ratio_rel_std: float
    structural_match: bool
    exact_match: bool
    notes: str = ""
    spin_factor: SpinFactor = SpinFactor.LITERAL
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "Z": self.Z,
            "spin_factor": self.spin_factor.value,
            "grid": self.grid,
            "points": [
                {"omega": float(o), "v27": float(a), "v26": float(b), "ratio": float(r)}
                for o, a, b, r in zip(self.omega, self.v27, self.v26, self.ratio)
            ],
            "ratio_mean": self.ratio_mean,
            "ratio_rel_std": self.ratio_rel_std,
            "structural_match": self.structural_match,
            "exact_match": self.exact_match,
            "notes": self.notes,
        }


@provenance("potentials", "yukawa")
def yukawa(r, params: YukawaParams):
    """Screened nucleon-nucleon potential ``-g^2 exp(-r/range) / r``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise NonPositiveDistance("Yukawa potential needs r > 0")
    out = -params.gamma_sq * np.exp(-r / params.range) / r
    return float(out) if out.ndim == 0 else out


@provenance("potentials", "closed_shell_config")
def closed_shell_config(Z: int) -> ShellConfig:
    """Fill shells n = 1, 2, ... with 2n^2 electrons until Z is used up."""
    if Z < 2 or int(Z) != Z:
        raise NotClosedShell(f"Z={Z} is not a closed-shell atomic number")
    shells = []
    total, n = 0, 1
    while total < Z:
        shells.append((n, 2 * n * n))
        total += 2 * n * n
        n += 1
    if total != Z:
        raise NotClosedShell(
            f"Z={Z} is not a sum of full shell capacities 2n^2 (nearest {total - shells[-1][1]}, {total})")
    return ShellConfig(tuple(shells))


@lru_cache(maxsize=None)
def shell_terms(n: int) -> tuple[tuple[int, Fraction, Fraction], ...]:
    """Exact coefficients of the closed-form sum for one shell.

    Each entry is ``(N, c*N!, c*(N-1)!)`` where ``N = 2l + t + 2`` and
    ``c`` is the product of the rational prefactors for that (l, g, t).
    """
    terms = []
    for l in range(n):
        nr = n - l - 1
        for g in range(nr + 1):
            for t in range(2 * g + 1):
                c = (Fraction(2 * l + 1, 2 * n * 4 ** nr)
                     * math.comb(2 * nr - 2 * g, nr - g)
                     * Fraction(math.factorial(2 * g),
                                math.factorial(g) * math.factorial(2 * l + 1 + g))
                     * math.comb(2 * g + 2 * (2 * l + 1), 2 * g - t)
                     * Fraction((-2) ** t, math.factorial(t)))
                N = 2 * l + t + 2
                terms.append((N, c * math.factorial(N), c * math.factorial(N - 1)))
    return tuple(terms)


def _shell_closed_form(n: int, Z: int, omega: np.ndarray, a_mu: float) -> np.ndarray:
    beta = 2.0 * Z / (n * a_mu)
    x = beta * omega
    out = np.zeros_like(omega)
    pos = omega > 0
    for N, cN, cN1 in shell_terms(n):
        # 1 - e^-x sum_{f<=N} x^f/f! is the regularised lower gamma P(N+1, x);
        # e^-x sum_{f<N} x^f/f! is the upper one Q(N, x)
        upper = float(cN1) * beta * special.gammaincc(N, x)
        lower = np.zeros_like(omega)
        lower[pos] = float(cN) * special.gammainc(N + 1, x[pos]) / omega[pos]
        out += lower + upper
    return out


@provenance("potentials", "effective_potential_closed_form")
def effective_potential_closed_form(Z: int, omega, a_mu: float = 1.0, k: float = 1.0,
                                    spin_factor: SpinFactor | str = SpinFactor.LITERAL):
    """Closed-form electron-mediated CM-relative potential.

    ``omega`` may be a scalar or an array; ``omega = 0`` returns the
    finite limit. ``spin_factor="doubled"`` counts two electrons per
    spatial orbital.
    """
    config = closed_shell_config(Z)
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise InvalidParameter("omega must be >= 0")
    flat = np.atleast_1d(w).astype(float)
    total = np.zeros_like(flat)
    for n in config.principal_numbers:
        total += _shell_closed_form(n, Z, flat, a_mu)
    factor = 2.0 if SpinFactor(spin_factor) is SpinFactor.DOUBLED else 1.0
    out = factor * k * Z * total
    return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)


def radial_density(n: int, l: int, Z: int, r, a_mu: float = 1.0):
    """|R_nl(r)|^2 of a hydrogenic orbital with nuclear charge Z."""
    r = np.asarray(r, dtype=float)
    rho = 2.0 * Z * r / (n * a_mu)
    norm = (2.0 * Z / (n * a_mu)) ** 3 * math.factorial(n - l - 1) / (2 * n * math.factorial(n + l))
    lag = special.eval_genlaguerre(n - l - 1, 2 * l + 1, rho)
    return norm * np.exp(-rho) * rho ** (2 * l) * lag ** 2


def _shell_potential(n: int, l: int, Z: int, omega: float, a_mu: float) -> tuple[float, float]:
    """Potential (per electron) of one (n, l) orbital at radius omega, with error."""
    decay = Z / (n * a_mu)
    opts = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    inner, inner_err = 0.0, 0.0
    if omega > 0:
        inner, inner_err = integrate.quad(
            lambda r: radial_density(n, l, Z, r, a_mu) * r * r, 0.0, omega, **opts)
        inner, inner_err = inner / omega, inner_err / omega

    # tail: r = omega - ln(u)/decay maps [omega, inf) onto (0, 1]
    def tail(u):
        r = omega - math.log(u) / decay
        return radial_density(n, l, Z, r, a_mu) * r / (decay * u)

    outer, outer_err = integrate.quad(tail, 0.0, 1.0, **opts)
    return inner + outer, inner_err + outer_err


@provenance("potentials", "effective_potential_quadrature")
def effective_potential_quadrature(Z: int, omega, a_mu: float = 1.0, k: float = 1.0):
    """Electron-mediated potential from direct radial integration.

    Every occupied orbital contributes ``int |phi|^2 / max(r, omega)``;
    closed shells make the density spherical, so the angular integral
    is exact.
    """
    config = closed_shell_config(Z)
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise InvalidParameter("omega must be >= 0")
    flat = np.atleast_1d(w)
    out = np.empty_like(flat)
    for i, om in enumerate(flat):
        value, err = 0.0, 0.0
        for n in config.principal_numbers:
            for l in range(n):
                v, e = _shell_potential(n, l, Z, float(om), a_mu)
                occ = 2 * (2 * l + 1)
                value += occ * v
                err += occ * e
        if err > QUAD_MAX_REL_ERROR * abs(value):
            raise QuadratureNonConvergence(
                f"Z={Z}, omega={om}: relative error estimate {err / abs(value):.2e}")
        out[i] = k * Z * value
    return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)


def evaluate(Z: int, omega, method: Method | str, a_mu: float = 1.0, k: float = 1.0,
             spin_factor: SpinFactor | str = SpinFactor.LITERAL) -> RadialPotential:
    """Tabulate the effective potential on a grid with either method."""
    method = Method(method)
    omega = np.asarray(omega, dtype=float)
    if method is Method.CLOSED_FORM:
        values = effective_potential_closed_form(Z, omega, a_mu, k, spin_factor)
        return RadialPotential(method, Z, a_mu, omega, values, SpinFactor(spin_factor))
    values = effective_potential_quadrature(Z, omega, a_mu, k)
    return RadialPotential(method, Z, a_mu, omega, values)


def default_conformance_grid(a_mu: float = 1.0, points: int = 32) -> np.ndarray:
    return np.geomspace(0.01, 20.0, points) * a_mu


@provenance("potentials", "conformance_27_vs_26")
def conformance_27_vs_26(Z: int, omega_grid=None, a_mu: float = 1.0,
                         spin_factor: SpinFactor | str = SpinFactor.LITERAL,
                         tol: float = 1e-6) -> ConformanceReport:
    """Compare the closed form against quadrature on a grid.

    A constant ratio means the two agree up to normalisation
    (``structural_match``); a ratio of 1 means they agree outright.
    """
    if omega_grid is None:
        omega_grid = default_conformance_grid(a_mu)
    grid = np.asarray(omega_grid, dtype=float)
    if grid.size == 0:
        raise EmptyGrid("conformance grid is empty")
    if np.any(grid <= 0):
        raise InvalidParameter("conformance grid must be strictly positive")
    spin_factor = SpinFactor(spin_factor)
    v27 = np.atleast_1d(effective_potential_closed_form(Z, grid, a_mu, spin_factor=spin_factor))
    v26 = np.atleast_1d(effective_potential_quadrature(Z, grid, a_mu))
    ratio = v27 / v26
    mean = float(ratio.mean())
    rel_std = float(ratio.std() / abs(mean))
    structural = rel_std <= tol
    exact = structural and abs(mean - 1.0) <= tol
    notes = ""
    if structural and not exact:
        notes = (f"closed form is a constant {mean:.12g} times the quadrature value; "
                 f"a ratio of 1/2 is the missing two-electrons-per-orbital spin factor")
    elif not structural:
        notes = "ratio varies across the grid: the two evaluators disagree in shape"
    return ConformanceReport(
        Z=Z, omega=grid, v27=v27, v26=v26, ratio=ratio, ratio_mean=mean,
        ratio_rel_std=rel_std, structural_match=structural, exact_match=exact,
        notes=notes, spin_factor=spin_factor,
        grid={"points": int(grid.size), "omega_min": float(grid.min()),
              "omega_max": float(grid.max()), "a_mu": a_mu})


@dataclass
class ScalingFit:
    Z: list[int]
    omega: float
    values: list[float]
    exponent: float
    intercept: float
    residuals: list[float]

    def to_dict(self) -> dict:
        return {"Z": self.Z, "omega": self.omega, "values": self.values,
                "exponent": self.exponent, "intercept": self.intercept,
                "residuals": self.residuals}


@provenance("potentials", "scaling_exponent")
def scaling_fit(Z_list, omega_probe: float, a_mu: float = 1.0) -> ScalingFit:
    """Least-squares fit of log V against log Z at a fixed probe radius."""
    Zs = [int(z) for z in Z_list]
    if len(Zs) < 2:
        raise DegenerateFit("need at least two atomic numbers")
    if not omega_probe > 0:
        raise InvalidParameter("omega_probe must be > 0")
    logZ = np.log(np.asarray(Zs, dtype=float))
    if np.ptp(logZ) == 0:
        raise DegenerateFit("all atomic numbers are equal; slope undefined")
    values = [effective_potential_quadrature(z, omega_probe, a_mu) for z in Zs]
    logV = np.log(values)
    slope, intercept = np.polyfit(logZ, logV, 1)
    resid = logV - (slope * logZ + intercept)
    return ScalingFit(Zs, float(omega_probe), [float(v) for v in values],
                      float(slope), float(intercept), resid.tolist())


def scaling_exponent(Z_list, omega_probe: float, a_mu: float = 1.0) -> float:
    return scaling_fit(Z_list, omega_probe, a_mu).exponent
