"""Dense tensor-product state algebra.

A :class:`QState` is an immutable pure vector or density matrix over an
ordered list of labelled factors (``S``, ``CM``, ``R`` ...). Operations
return new states. Pure states are promoted to density matrices only
when a density operation genuinely needs one; reductions of large pure
states go through the smaller Schmidt side instead.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (DimensionMismatch, InvalidState, KindMismatch, NonOrthonormalBasis,
                     UnknownLabel, provenance)

PURE_NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
ORTHONORMAL_TOL = 1e-8


class Kind(str, enum.Enum):
    PURE = "pure"
    DENSITY = "density"


@dataclass(frozen=True)
class SpaceLabel:
    name: str
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidState(f"dimension of {self.name!r} must be a positive integer")


class QState:
    """Pure state vector or density matrix on a labelled tensor product."""

    __slots__ = ("space", "kind", "data")

    def __init__(self, space: Sequence[SpaceLabel], kind: Kind | str, data, *, check: bool = True):
        space = tuple(space)
        names = [s.name for s in space]
        if len(set(names)) != len(names):
            raise InvalidState(f"factor names must be unique, got {names}")
        kind = Kind(kind)
        arr = np.array(data, dtype=complex)
        dim = int(np.prod([s.dim for s in space])) if space else 1
        if kind is Kind.PURE:
            arr = arr.reshape(-1)
            if arr.size != dim:
                raise DimensionMismatch(f"vector length {arr.size} != product of dims {dim}")
        else:
            if arr.shape != (dim, dim):
                raise DimensionMismatch(f"density shape {arr.shape} != ({dim}, {dim})")
        arr.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "data", arr)
        if check:
            self.validate()

    def __setattr__(self, name, value):
        raise AttributeError("QState is immutable")

    def __repr__(self):
        dims = "x".join(f"{s.name}({s.dim})" for s in self.space)
        return f"QState({self.kind.value}, {dims})"

    # -- basic properties -------------------------------------------------
    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.space)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.space)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims)) if self.space else 1

    @property
    def is_pure(self) -> bool:
        return self.kind is Kind.PURE

    def index(self, label: SpaceLabel | str) -> int:
        name = label.name if isinstance(label, SpaceLabel) else label
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownLabel(f"no factor named {name!r} in {self.names}") from None

    def validate(self) -> None:
        if self.kind is Kind.PURE:
            norm = np.linalg.norm(self.data)
            if abs(norm - 1.0) > PURE_NORM_TOL:
                raise InvalidState(f"pure state norm {norm!r} is not 1")
            return
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"density matrix trace {tr!r} is not 1")
        if rho.shape[0] <= 4096 and np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise InvalidState("density matrix is not positive semidefinite")

    def density(self) -> "QState":
        """This state as a density matrix."""
        if self.kind is Kind.DENSITY:
            return self
        v = self.data
        return QState(self.space, Kind.DENSITY, np.outer(v, v.conj()), check=False)

    def tensor_array(self) -> np.ndarray:
        """Data reshaped to one axis per factor (two per factor for densities)."""
        if self.kind is Kind.PURE:
            return self.data.reshape(self.dims)
        return self.data.reshape(self.dims + self.dims)

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:
        flat = self.data.reshape(-1)
        inter = np.empty(2 * flat.size)
        inter[0::2] = flat.real
        inter[1::2] = flat.imag
        return {
            "space": [{"name": s.name, "dim": s.dim} for s in self.space],
            "kind": self.kind.value,
            "data": inter.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "QState":
        space = [SpaceLabel(s["name"], int(s["dim"])) for s in doc["space"]]
        inter = np.asarray(doc["data"], dtype=float)
        data = inter[0::2] + 1j * inter[1::2]
        kind = Kind(doc["kind"])
        if kind is Kind.DENSITY:
            dim = int(np.prod([s.dim for s in space]))
            data = data.reshape(dim, dim)
        return cls(space, kind, data)

    @classmethod
    def from_json(cls, text: str) -> "QState":
        return cls.from_dict(json.loads(text))


# -- constructors -----------------------------------------------------------

def ket(amplitudes, name: str, normalize: bool = False) -> QState:
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if normalize:
        v = v / np.linalg.norm(v)
    return QState([SpaceLabel(name, v.size)], Kind.PURE, v)


def basis_ket(index: int, dim: int, name: str) -> QState:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return ket(v, name)


def density_matrix(rho, space: Sequence[SpaceLabel] | str) -> QState:
    rho = np.asarray(rho, dtype=complex)
    if isinstance(space, str):
        space = [SpaceLabel(space, rho.shape[0])]
    return QState(space, Kind.DENSITY, rho)


def maximally_mixed(dim: int, name: str) -> QState:
    return density_matrix(np.eye(dim) / dim, name)


SQRT_HALF = 2 ** -0.5
UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)
RIGHT = SQRT_HALF * (UP + DOWN)
LEFT = SQRT_HALF * (UP - DOWN)

SZ = 0.5 * np.diag([1.0, -1.0]).astype(complex)
SX = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
OBSERVABLES = {"Sz": SZ, "Sx": SX}


def spin(direction: str, name: str = "S") -> QState:
    """Spin-1/2 eigenstate: ``up``/``down`` (Sz) or ``right``/``left`` (Sx)."""
    vec = {"up": UP, "down": DOWN, "right": RIGHT, "left": LEFT}[direction]
    return ket(vec, name)


# -- composition and reduction ---------------------------------------------

@provenance("quantum-engine", "tensor")
def tensor(a: QState, b: QState, *more: QState) -> QState:
    """Kronecker product; factor lists are concatenated."""
    if more:
        return tensor(tensor(a, b), *more)
    if a.kind is not b.kind:
        raise KindMismatch(f"cannot tensor {a.kind.value} with {b.kind.value}")
    return QState(a.space + b.space, a.kind, np.kron(a.data, b.data))


def _split(state: QState, keep: Iterable[SpaceLabel | str]) -> tuple[list[int], list[int]]:
    keep_idx = sorted({state.index(k) for k in keep})
    if not keep_idx:
        raise UnknownLabel("keep must name at least one factor")
    rest = [i for i in range(len(state.space)) if i not in keep_idx]
    return keep_idx, rest


def _schmidt_matrix(state: QState, keep_idx, rest) -> np.ndarray:
    """Pure amplitudes as a (keep, rest) matrix."""
    dims = state.dims
    t = state.data.reshape(dims).transpose(keep_idx + rest)
    dk = int(np.prod([dims[i] for i in keep_idx]))
    return t.reshape(dk, -1)


@provenance("quantum-engine", "partial_trace")
def partial_trace(rho: QState, keep: Iterable[SpaceLabel | str]) -> QState:
    """Reduced density matrix over the kept factors (in their original order)."""
    keep_idx, rest = _split(rho, keep)
    space = [rho.space[i] for i in keep_idx]
    if rho.kind is Kind.PURE:
        m = _schmidt_matrix(rho, keep_idx, rest)
        return QState(space, Kind.DENSITY, m @ m.conj().T, check=False)
    n = len(rho.space)
    dims = rho.dims
    t = rho.data.reshape(dims + dims)
    # contract each traced factor's row and column axes
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in rest:
        col[i] = row[i]
    out = "".join(row[i] for i in keep_idx) + "".join(col[i] for i in keep_idx)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep_idx]))
    return QState(space, Kind.DENSITY, red.reshape(dk, dk), check=False)


def reduced_purity(state: QState, keep: Iterable[SpaceLabel | str]) -> float:
    """Purity of a reduced state without forming the large side.

    For pure states the kept and traced sides share one spectrum, so the
    smaller Gram matrix suffices.
    """
    keep_idx, rest = _split(state, keep)
    if state.kind is Kind.DENSITY:
        return purity(partial_trace(state, keep))
    if not rest:
        return 1.0
    m = _schmidt_matrix(state, keep_idx, rest)
    g = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
    return float(np.real(np.vdot(g, g)))


@provenance("quantum-engine", "purity")
def purity(rho: QState) -> float:
    """Tr(rho^2)."""
    if rho.kind is Kind.PURE:
        return float(np.vdot(rho.data, rho.data).real ** 2)
    return float(np.real(np.vdot(rho.data, rho.data)))


def eigenvalues(rho: QState) -> np.ndarray:
    """Spectrum of a density matrix, clipped at zero after a PSD check."""
    w = np.linalg.eigvalsh(rho.density().data)
    if w.min() < -PSD_TOL:
        raise InvalidState(f"density matrix has eigenvalue {w.min():.3e} < 0")
    return np.clip(w, 0.0, None)


def entropy_from_spectrum(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


@provenance("quantum-engine", "vn_entropy")
def vn_entropy(rho: QState) -> float:
    """Von Neumann entropy in nats, with 0 ln 0 = 0."""
    if rho.kind is Kind.PURE:
        return 0.0
    return entropy_from_spectrum(eigenvalues(rho))


def fidelity(a: QState, b: QState) -> float:
    """Root fidelity ``|| sqrt(a) sqrt(b) ||_1``."""
    if a.is_pure and b.is_pure:
        return float(abs(np.vdot(a.data, b.data)))
    sa = psd_sqrt(a.density().data)
    sb = psd_sqrt(b.density().data)
    return float(np.linalg.svd(sa @ sb, compute_uv=False).sum())


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


# -- measurement -------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementOutcome:
    value: float
    probability: float
    post_state: QState | None


def _apply_local(state: QState, op: np.ndarray, axis: int) -> np.ndarray:
    """Apply a single-factor operator on the ket side (and bra side for densities)."""
    if state.kind is Kind.PURE:
        t = state.tensor_array()
        t = np.moveaxis(np.tensordot(op, t, axes=(1, axis)), 0, axis)
        return t.reshape(-1)
    n = len(state.space)
    t = state.tensor_array()
    t = np.moveaxis(np.tensordot(op, t, axes=(1, axis)), 0, axis)
    t = np.moveaxis(np.tensordot(op.conj(), t, axes=(1, n + axis)), 0, n + axis)
    return t.reshape(state.dim, state.dim)


@provenance("quantum-engine", "measure")
def measure(state: QState, observable: str, subsystem: SpaceLabel | str = "S") -> list[MeasurementOutcome]:
    """Projective spin measurement (``Sz`` or ``Sx``) on a two-level factor.

    Outcomes are listed with eigenvalue +1/2 first. Post states are
    renormalised; an outcome with zero probability carries ``None``.
    """
    axis = state.index(subsystem)
    if state.dims[axis] != 2:
        raise DimensionMismatch(f"spin observable needs a two-level factor, {state.names[axis]} has dim {state.dims[axis]}")
    try:
        obs = OBSERVABLES[observable]
    except KeyError:
        raise UnknownLabel(f"unknown observable {observable!r}; choose from {sorted(OBSERVABLES)}") from None
    w, v = np.linalg.eigh(obs)
    outcomes = []
    for i in np.argsort(-w):
        proj = np.outer(v[:, i], v[:, i].conj())
        data = _apply_local(state, proj, axis)
        if state.kind is Kind.PURE:
            p = float(np.vdot(data, data).real)
            post = QState(state.space, Kind.PURE, data / np.sqrt(p)) if p > 0 else None
        else:
            p = float(np.trace(data).real)
            post = QState(state.space, Kind.DENSITY, data / p) if p > 0 else None
        outcomes.append(MeasurementOutcome(float(w[i]), p, post))
    return outcomes


@provenance("quantum-engine", "coherence_visibility")
def coherence_visibility(rho_cm: QState, basis, subsystem: SpaceLabel | str | None = None) -> float:
    """Fringe visibility ``2 |<-|rho|+>|`` of a two-branch superposition.

    ``basis`` is the ``(plus, minus)`` pair as arrays or single-factor
    states. If ``rho_cm`` has factors besides ``subsystem`` they are traced
    out implicitly; for pure inputs this never forms the reduced matrix.
    """
    plus, minus = (np.asarray(b.data if isinstance(b, QState) else b, dtype=complex).reshape(-1)
                   for b in basis)
    gram = np.array([[np.vdot(plus, plus), np.vdot(plus, minus)],
                     [np.vdot(minus, plus), np.vdot(minus, minus)]])
    if np.max(np.abs(gram - np.eye(2))) > ORTHONORMAL_TOL:
        raise NonOrthonormalBasis("branch states must be orthonormal")
    if subsystem is None:
        if len(rho_cm.space) != 1:
            raise UnknownLabel("subsystem must be named for a composite state")
        axis = 0
    else:
        axis = rho_cm.index(subsystem)
    if rho_cm.dims[axis] != plus.size:
        raise DimensionMismatch("basis vectors do not match the subsystem dimension")
    if rho_cm.kind is Kind.PURE:
        rest = [i for i in range(len(rho_cm.space)) if i != axis]
        m = _schmidt_matrix(rho_cm, [axis], rest)
        a = minus.conj() @ m
        b = plus.conj() @ m
        cross = np.vdot(b, a)  # <-|rho|+> = sum_r <-|chi_r><chi_r|+>
    else:
        red = partial_trace(rho_cm, [rho_cm.space[axis]]).data
        cross = minus.conj() @ red @ plus
    return float(min(1.0, 2.0 * abs(cross)))
