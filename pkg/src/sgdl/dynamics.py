"""Split-step dynamics of spin x centre of mass x internal recorder.

Units are hbar = M = 1 unless a config overrides the mass. The CM lives
on a periodic 1-D grid along the field gradient; the internal
environment R is a ``d``-level recorder. Internally R is held in the
eigenbasis of the cyclic-shift generator, where every coupling used here
is diagonal, and converted back to the recorder's level basis
(``|0>, |1>, ...``) at the public boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import engine
from .engine import Kind, QState, SpaceLabel
from .errors import (DimensionMismatch, GridTooCoarse, InvalidParameter, NormDrift,
                     provenance)

NORM_DRIFT_LIMIT = 1e-6
MIN_POINTS_PER_WIDTH = 8


class EnvironmentMode(str, enum.Enum):
    NONE = "none"
    LINEAR_RECORDER = "linear_recorder"
    POTENTIAL_DERIVED = "potential_derived"


class RecorderPreparation(str, enum.Enum):
    GROUND = "ground"  # |0>_R, moved by shifts: records which path
    SHIFT_INVARIANT = "shift_invariant"  # zero-eigenstate of the shift generator: records nothing


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 8192
    z_min: float = -256.0
    z_max: float = 256.0
    dt: float = 0.005
    n_steps: int = 2000

    def __post_init__(self):
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise InvalidParameter(f"n_points must be a power of two >= 64, got {n}")
        if not self.z_max > self.z_min:
            raise InvalidParameter("z_max must exceed z_min")
        if not self.dt > 0:
            raise InvalidParameter("dt must be > 0")
        if self.n_steps < 0:
            raise InvalidParameter("n_steps must be >= 0")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dz)

    @property
    def duration(self) -> float:
        return self.dt * self.n_steps


@dataclass(frozen=True)
class EnvironmentSpec:
    """Internal environment R.

    ``coupling`` is the recorder strength lambda; ``None`` lets the
    scenario choose the value that orthogonalises the two branch records
    by the end of the run. ``PotentialDerived`` ignores ``coupling`` and
    derives it from the curvature of the electron-mediated potential.
    """

    mode: EnvironmentMode = EnvironmentMode.NONE
    dim: int = 8
    coupling: float | None = None
    self_energy: tuple[float, ...] | None = None
    preparation: RecorderPreparation = RecorderPreparation.GROUND
    Z: int = 10
    a_mu: float = 1.0
    omega0: float = 1.0
    level_offset: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "mode", EnvironmentMode(self.mode))
        object.__setattr__(self, "preparation", RecorderPreparation(self.preparation))
        if self.self_energy is not None:
            object.__setattr__(self, "self_energy", tuple(float(e) for e in self.self_energy))
            if len(self.self_energy) != self.dim:
                raise InvalidParameter("self_energy needs one entry per recorder level")
        if self.mode is not EnvironmentMode.NONE and self.dim < 2:
            raise InvalidParameter("a recorder needs at least two levels")
        if self.dim < 1:
            raise InvalidParameter("recorder dimension must be >= 1")

    @property
    def active(self) -> bool:
        return self.mode is not EnvironmentMode.NONE


@dataclass(frozen=True)
class HamiltonianSpec:
    mass: float = 1.0
    field_gradient: float = 16.0
    magneton: float = 0.5
    environment: EnvironmentSpec = field(default_factory=EnvironmentSpec)

    def __post_init__(self):
        if not self.mass > 0:
            raise InvalidParameter("mass must be > 0")

    @property
    def force(self) -> float:
        """mu_B * b; each spin branch feels -/+ half of it."""
        return self.magneton * self.field_gradient


# -- recorder algebra ----------------------------------------------------------

def shift_generator_levels(d: int) -> np.ndarray:
    """Integer eigenvalues of the cyclic-shift generator, centred on zero."""
    return np.round(np.fft.fftfreq(d) * d)


def recorder_fourier(d: int) -> np.ndarray:
    """Unitary F with ``F[k, j] = <g_k|j>``, rows indexed like :func:`shift_generator_levels`."""
    g = shift_generator_levels(d)
    j = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(g, j) / d) / np.sqrt(d)


def shift_generator(d: int) -> np.ndarray:
    """Hermitian G with ``exp(-2 pi i G / d) |j> = |j+1 mod d>``."""
    F = recorder_fourier(d)
    return F.conj().T @ np.diag(shift_generator_levels(d)) @ F


def recorder_state(env: EnvironmentSpec) -> np.ndarray:
    d = env.dim
    if env.preparation is RecorderPreparation.GROUND:
        v = np.zeros(d, dtype=complex)
        v[0] = 1.0
        return v
    return recorder_fourier(d).conj().T[:, 0].copy()  # |g_0>


def gaussian_packet(grid: GridSpec, width: float = 1.0, center: float = 0.0,
                    momentum: float = 0.0) -> np.ndarray:
    """Minimal-uncertainty packet with position std ``width``, unit vector norm."""
    z = grid.z
    psi = np.exp(-((z - center) ** 2) / (4 * width ** 2) + 1j * momentum * z)
    return psi / np.linalg.norm(psi)


def free_width(width: float, t: float, mass: float = 1.0) -> float:
    """Position std of a free Gaussian after time t."""
    return width * math.sqrt(1.0 + (t / (2 * mass * width ** 2)) ** 2)


def branch_integral(ham: HamiltonianSpec, t: float) -> float:
    """|integral of <z> dt| along one spin branch, starting at rest from z = 0."""
    accel = 0.5 * ham.force / ham.mass
    return accel * t ** 3 / 6.0


def orthogonalizing_coupling(ham: HamiltonianSpec, t: float, d: int, fraction: float = 1.0) -> float:
    """Recorder strength whose branch records reach ``fraction`` of the first zero overlap at t.

    The records differ by a phase ``2 lambda I k`` per generator level k,
    with I from :func:`branch_integral`; they are orthogonal when that
    phase step equals ``2 pi / d``.
    """
    area = branch_integral(ham, t)
    if area <= 0:
        raise InvalidParameter("branches do not separate; cannot drive the recorder")
    return fraction * math.pi / (d * area)


@provenance("dynamics", "build_hamiltonian")
def potential_derived_coupling(env: EnvironmentSpec) -> float:
    """Bilinear CM-R coupling from the effective potential's curvature.

    Each recorder level k sits at relative offset ``level_offset * k``;
    expanding ``V(omega0 + z + offset)`` to second order leaves
    ``V''(omega0) * z * offset`` as the only entangling term.
    """
    from .potentials import SpinFactor, effective_potential_closed_form

    h = 1e-3 * env.omega0
    w = env.omega0 + np.array([-h, 0.0, h])
    v = effective_potential_closed_form(env.Z, w, env.a_mu, spin_factor=SpinFactor.DOUBLED)
    curvature = (v[0] - 2 * v[1] + v[2]) / h ** 2
    return abs(curvature) * env.level_offset


# -- propagator ------------------------------------------------------------------

class Propagator:
    """Second-order (Strang) split-step propagator.

    One step applies half the diagonal potential, half the recorder self
    energy, the full kinetic phase in momentum space, then the two halves
    in reverse order.
    """

    def __init__(self, grid: GridSpec, ham: HamiltonianSpec, coupling: float,
                 spin_values: Sequence[float] = (0.5, -0.5)):
        self.grid = grid
        self.ham = ham
        self.coupling = float(coupling)
        self.spin_values = np.asarray(spin_values, dtype=float)
        env = ham.environment
        self.d = env.dim
        z = grid.z
        levels = shift_generator_levels(self.d)
        # V[s, k, z] = mu_B b z S_z + lambda z g_k
        V = (ham.force * self.spin_values[:, None, None] * z[None, None, :]
             + self.coupling * levels[None, :, None] * z[None, None, :])
        self.potential = V
        self._v_half = np.exp(-0.5j * grid.dt * V)
        self._kinetic = np.exp(-0.5j * grid.dt * grid.k ** 2 / ham.mass)
        self._fourier = recorder_fourier(self.d)
        self._r_half = None
        if env.self_energy is not None and any(env.self_energy):
            F = self._fourier
            h_r = F @ np.diag(env.self_energy) @ F.conj().T
            w, v = np.linalg.eigh(h_r)
            self._r_half = (v * np.exp(-0.5j * grid.dt * w)) @ v.conj().T

    @property
    def space(self) -> tuple[SpaceLabel, ...]:
        labels = []
        if self.spin_values.size > 1:
            labels.append(SpaceLabel("S", self.spin_values.size))
        labels += [SpaceLabel("CM", self.grid.n_points), SpaceLabel("R", self.d)]
        return tuple(labels)

    def to_internal(self, state: QState) -> np.ndarray:
        if state.kind is not Kind.PURE:
            raise DimensionMismatch("propagation needs a pure state")
        if state.space != self.space:
            raise DimensionMismatch(f"state space {state.names}{state.dims} does not match "
                                    f"propagator {tuple(s.name for s in self.space)}")
        ns = self.spin_values.size
        psi = state.data.reshape(ns, self.grid.n_points, self.d)
        # (s, z, j) -> (s, k, z)
        return np.einsum("kj,szj->skz", self._fourier, psi)

    def to_state(self, psi: np.ndarray) -> QState:
        pub = np.einsum("kj,skz->szj", self._fourier.conj(), psi)
        vec = pub.reshape(-1)
        return QState(self.space, Kind.PURE, vec / np.linalg.norm(vec), check=False)

    def step(self, psi: np.ndarray) -> np.ndarray:
        psi = self._v_half * psi
        if self._r_half is not None:
            psi = np.einsum("kl,slz->skz", self._r_half, psi)
        psi = np.fft.ifft(self._kinetic * np.fft.fft(psi, axis=-1), axis=-1)
        if self._r_half is not None:
            psi = np.einsum("kl,slz->skz", self._r_half, psi)
        return self._v_half * psi


@provenance("dynamics", "build_hamiltonian")
def build_hamiltonian(grid: GridSpec, ham: HamiltonianSpec, packet_width: float | None = None,
                      coupling: float | None = None, spin: bool = True) -> Propagator:
    """Assemble the split-step propagator for the given physics.

    ``coupling`` overrides the environment's recorder strength (used when
    the scenario resolves an automatic value). ``spin=False`` drops the
    spin factor and the field term, leaving CM x R only.
    """
    env = ham.environment
    if packet_width is not None and packet_width / grid.dz < MIN_POINTS_PER_WIDTH:
        raise GridTooCoarse(
            f"packet width {packet_width} spans {packet_width / grid.dz:.2f} grid points "
            f"(< {MIN_POINTS_PER_WIDTH})")
    if env.mode is EnvironmentMode.NONE:
        lam = 0.0
    elif env.mode is EnvironmentMode.POTENTIAL_DERIVED:
        lam = potential_derived_coupling(env)
    else:
        lam = coupling if coupling is not None else env.coupling
        if lam is None:
            raise InvalidParameter("recorder coupling unresolved; pass a value or use a scenario")
    spins = (0.5, -0.5) if spin else (0.0,)
    return Propagator(grid, ham, lam, spins)


# -- diagnostics -------------------------------------------------------------------

def _nuclear_norm_cross(x: np.ndarray, y: np.ndarray) -> float:
    """Trace norm of ``Tr_R |x><y|`` for (d, N) amplitude blocks, via d x d factors."""
    _, rx = np.linalg.qr(x.T)
    _, ry = np.linalg.qr(y.T)
    return float(np.linalg.svd(rx @ ry.conj().T, compute_uv=False).sum())


@dataclass
class Diagnostics:
    norm: float
    spin_entropy: float
    packet_separation: float
    record_overlap: float
    cm_purity: float
    offdiag_norm: float
    widths: tuple[float, float]


def diagnose(psi: np.ndarray, z: np.ndarray) -> Diagnostics:
    """Observables of an internal (s, k, z) amplitude array with two spin branches."""
    norm = float(np.vdot(psi, psi).real)
    flat = psi.reshape(psi.shape[0], -1)
    rho_s = flat @ flat.conj().T
    spin_entropy = engine.entropy_from_spectrum(np.clip(np.linalg.eigvalsh(rho_s), 0, None))
    rho_r = np.einsum("skz,slz->kl", psi, psi.conj())
    cm_purity = float(np.real(np.vdot(rho_r, rho_r)))
    up, down = psi[0], psi[1]
    p_up = np.sum(np.abs(up) ** 2, axis=0)
    p_down = np.sum(np.abs(down) ** 2, axis=0)
    w_up, w_down = p_up.sum(), p_down.sum()
    mean_up = float(p_up @ z / w_up)
    mean_down = float(p_down @ z / w_down)
    sd_up = math.sqrt(max(float(p_up @ z ** 2 / w_up) - mean_up ** 2, 0.0))
    sd_down = math.sqrt(max(float(p_down @ z ** 2 / w_down) - mean_down ** 2, 0.0))
    cross = _nuclear_norm_cross(up, down)
    overlap = cross / math.sqrt(w_up * w_down)
    return Diagnostics(norm, spin_entropy, mean_up - mean_down, min(overlap, 1.0),
                       cm_purity, 2.0 * cross, (sd_up, sd_down))


@dataclass
class RunRecord:
    times: list[float] = field(default_factory=list)
    norm: list[float] = field(default_factory=list)
    spin_entropy: list[float] = field(default_factory=list)
    packet_separation: list[float] = field(default_factory=list)
    record_overlap: list[float] = field(default_factory=list)
    cm_purity: list[float] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    SERIES = ("norm", "spin_entropy", "packet_separation", "record_overlap", "cm_purity")

    def append(self, t: float, diag: Diagnostics) -> None:
        self.times.append(float(t))
        for name in self.SERIES:
            getattr(self, name).append(float(getattr(diag, name)))

    def __len__(self) -> int:
        return len(self.times)

    def series(self) -> dict[str, list[float]]:
        return {"t": self.times, **{name: getattr(self, name) for name in self.SERIES}}

    def to_dict(self) -> dict:
        return {"series": self.series(), "summary": self.summary}


@provenance("dynamics", "propagate")
def propagate(state: QState, prop: Propagator, record_every: int = 10,
              n_steps: int | None = None) -> tuple[RunRecord, QState]:
    """Evolve ``state`` for the grid's step count, sampling diagnostics.

    Samples are taken at t = 0, every ``record_every`` steps and at the
    final step. Raises :class:`NormDrift` when unitarity degrades.
    """
    if record_every < 1:
        raise InvalidParameter("record_every must be >= 1")
    steps = prop.grid.n_steps if n_steps is None else n_steps
    psi = prop.to_internal(state)
    z = prop.grid.z
    two_branch = prop.spin_values.size == 2
    record = RunRecord()

    def sample(i):
        if two_branch:
            diag = diagnose(psi, z)
        else:
            n = float(np.vdot(psi, psi).real)
            diag = Diagnostics(n, 0.0, 0.0, 1.0, 1.0, 0.0, (0.0, 0.0))
        if abs(diag.norm - 1.0) > NORM_DRIFT_LIMIT:
            raise NormDrift(f"norm {diag.norm!r} after {i} steps; reduce dt")
        record.append(i * prop.grid.dt, diag)

    sample(0)
    for i in range(1, steps + 1):
        psi = prop.step(psi)
        if i % record_every == 0 or i == steps:
            sample(i)
    return record, prop.to_state(psi)


# -- scenarios ---------------------------------------------------------------------

@dataclass(frozen=True)
class PacketSpec:
    width: float = 1.0
    center: float = 0.0
    momentum: float = 0.0


def initial_state(grid: GridSpec, ham: HamiltonianSpec, packet: PacketSpec) -> QState:
    """x-polarised spin x Gaussian CM packet x recorder preparation."""
    psi = gaussian_packet(grid, packet.width, packet.center, packet.momentum)
    cm = QState([SpaceLabel("CM", grid.n_points)], Kind.PURE, psi)
    r = QState([SpaceLabel("R", ham.environment.dim)], Kind.PURE, recorder_state(ham.environment))
    return engine.tensor(engine.spin("right"), cm, r)


def resolve_coupling(grid: GridSpec, ham: HamiltonianSpec) -> float:
    env = ham.environment
    if env.mode is EnvironmentMode.NONE:
        return 0.0
    if env.mode is EnvironmentMode.POTENTIAL_DERIVED:
        return potential_derived_coupling(env)
    if env.coupling is not None:
        return env.coupling
    return orthogonalizing_coupling(ham, grid.duration, env.dim)


@dataclass
class SGRun:
    record: RunRecord
    final_state: QState
    propagator: Propagator


def run_sg(grid: GridSpec, ham: HamiltonianSpec, packet: PacketSpec = PacketSpec(),
           record_every: int = 20) -> SGRun:
    lam = resolve_coupling(grid, ham)
    prop = build_hamiltonian(grid, ham, packet_width=packet.width, coupling=lam)
    record, final = propagate(initial_state(grid, ham, packet), prop, record_every)
    psi = prop.to_internal(final)
    diag = diagnose(psi, grid.z)
    width = math.sqrt(0.5 * (diag.widths[0] ** 2 + diag.widths[1] ** 2))
    r_ground = recorder_state(ham.environment)
    rho_r = engine.partial_trace(final, ["R"]).data
    record.summary = {
        "coupling": lam,
        "final_spin_entropy": diag.spin_entropy,
        "final_separation": diag.packet_separation,
        "final_separation_widths": abs(diag.packet_separation) / width if width > 0 else 0.0,
        "final_width": width,
        "r_fidelity_initial": float(np.real(r_ground.conj() @ rho_r @ r_ground)),
        "record_overlap": diag.record_overlap,
        "offdiag_norm": diag.offdiag_norm,
        "cm_purity": diag.cm_purity,
    }
    return SGRun(record, final, prop)


@provenance("dynamics", "sg_scenario")
def sg_scenario(grid: GridSpec = GridSpec(), ham: HamiltonianSpec = HamiltonianSpec(),
                packet: PacketSpec = PacketSpec(), record_every: int = 20) -> RunRecord:
    """Stern-Gerlach run from the x-polarised product state."""
    return run_sg(grid, ham, packet, record_every).record


@dataclass
class ErasureReport:
    p_plus: float
    visibility_conditioned: float
    cm_purity_conditioned: float
    record_overlap: float

    def to_dict(self) -> dict:
        return asdict(self)


def branch_packets(run: SGRun) -> tuple[np.ndarray, np.ndarray]:
    """Normalised (plus, minus) CM packets of a recorder-free run.

    The spin-down branch drifts to +z and is the ``+`` trajectory.
    """
    t = run.final_state.tensor_array()  # (s, z, j)
    r0 = recorder_state(run.propagator.ham.environment)
    minus = t[0] @ r0.conj()
    plus = t[1] @ r0.conj()
    plus = plus / np.linalg.norm(plus)
    minus = minus / np.linalg.norm(minus)
    # remove the exponentially small residual overlap
    minus = minus - np.vdot(plus, minus) * plus
    return plus, minus / np.linalg.norm(minus)


@provenance("dynamics", "erasure_scenario")
def erasure_scenario(grid: GridSpec = GridSpec(), ham: HamiltonianSpec = HamiltonianSpec(),
                     packet: PacketSpec = PacketSpec(), run: SGRun | None = None) -> ErasureReport:
    """Measure Sx after the run and test the conditioned CM for interference.

    The reference trajectory pair comes from the same physics with the
    recorder decoupled.
    """
    if run is None:
        run = run_sg(grid, ham, packet)
    if ham.environment.active:
        ref_env = replace(ham.environment, mode=EnvironmentMode.NONE)
        reference = run_sg(grid, replace(ham, environment=ref_env), packet)
    else:
        reference = run
    plus, minus = branch_packets(reference)
    outcome = engine.measure(run.final_state, "Sx", "S")[0]
    post = outcome.post_state
    vis = engine.coherence_visibility(post, (plus, minus), "CM")
    pur = engine.reduced_purity(post, ["CM"])
    return ErasureReport(outcome.probability, vis, pur, run.record.summary["record_overlap"])


# -- pointer sieve --------------------------------------------------------------------

@dataclass
class SieveEntry:
    label: str
    state: QState
    production: float


def standard_candidates(grid: GridSpec, width: float = 1.0, split: float = 3.0) -> dict[str, QState]:
    """Minimal-uncertainty packet, a position-squeezed one, and a two-packet cat."""
    def cm(psi):
        return QState([SpaceLabel("CM", grid.n_points)], Kind.PURE, psi / np.linalg.norm(psi))

    cat = gaussian_packet(grid, width, -split * width) + gaussian_packet(grid, width, split * width)
    return {
        "minimal_uncertainty": cm(gaussian_packet(grid, width)),
        "position_squeezed": cm(gaussian_packet(grid, width / 4)),
        "two_packet": cm(cat),
    }


SIEVE_GRID = GridSpec(n_points=4096, z_min=-40.0, z_max=40.0, dt=0.005, n_steps=0)
SIEVE_COUPLING = 0.02
SIEVE_TIME = 4.0


@provenance("dynamics", "pointer_sieve")
def pointer_sieve(candidates: Sequence[QState] | Mapping[str, QState], env: EnvironmentSpec,
                  t: float, grid: GridSpec = SIEVE_GRID, mass: float = 1.0) -> list[SieveEntry]:
    """Rank CM states by linear entropy produced under CM + recorder dynamics.

    Each candidate, times the recorder preparation, evolves under the free
    CM kinetic term plus the recorder coupling (no field term). Returns
    entries sorted by ``1 - purity`` of the reduced CM state, ascending.
    """
    if not env.active:
        raise InvalidParameter("the sieve needs an active environment")
    if isinstance(candidates, Mapping):
        items = list(candidates.items())
    else:
        items = [(f"candidate_{i}", c) for i, c in enumerate(candidates)]
    ham = HamiltonianSpec(mass=mass, field_gradient=0.0, environment=env)
    lam = env.coupling if env.mode is EnvironmentMode.LINEAR_RECORDER else potential_derived_coupling(env)
    if lam is None:
        raise InvalidParameter("the sieve needs an explicit recorder coupling")
    prop = build_hamiltonian(grid, ham, coupling=lam, spin=False)
    steps = int(round(t / grid.dt))
    r = QState([SpaceLabel("R", env.dim)], Kind.PURE, recorder_state(env))
    out = []
    for label, cand in items:
        if cand.names != ("CM",) or cand.dims != (grid.n_points,):
            raise DimensionMismatch(f"candidate {label!r} is not a CM state on the sieve grid")
        _, final = propagate(engine.tensor(cand, r), prop, record_every=max(steps, 1), n_steps=steps)
        out.append(SieveEntry(label, cand, 1.0 - engine.reduced_purity(final, ["CM"])))
    out.sort(key=lambda e: e.production)
    return out


def ranking_tied(entries: Sequence[SieveEntry], tol: float = 1e-10) -> bool:
    """True when every production agrees within ``tol``."""
    values = [e.production for e in entries]
    return max(values) - min(values) <= tol if values else True
