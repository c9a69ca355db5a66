from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from config.settings import DEFAULT_TOL
from quantum.linalg_core import (
    ComplexMatrix,
    SpaceDescriptor,
    as_matrix,
    embed,
    identity,
    is_hermitian,
    max_abs,
)
from utils.errors import DimensionMismatchError, NotNormalizedError, SpecError

NORM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    space: SpaceDescriptor
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.space.total_dim:
            raise DimensionMismatchError(
                f"{amps.shape[0]} amplitudes for a space of dimension {self.space.total_dim}"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def inner(self, other: "StateVector") -> complex:
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class Projector:
    op: ComplexMatrix
    space: SpaceDescriptor
    label: str = field(default="P")
    # outer products, embeddings and complements of checked projectors skip the O(n^3) check
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.op).copy()
        n = self.space.total_dim
        if m.shape != (n, n):
            raise DimensionMismatchError(f"projector of shape {m.shape} on a space of dimension {n}")
        if self.validate:
            self._check(m)
        object.__setattr__(self, "op", _frozen(m))

    def _check(self, m: ComplexMatrix) -> None:
        if not is_hermitian(m, DEFAULT_TOL):
            raise SpecError(f"projector {self.label!r} is not hermitian")
        if max_abs(m @ m - m) > DEFAULT_TOL:
            raise SpecError(f"projector {self.label!r} is not idempotent")


def require_normalized(v: StateVector) -> None:
    if abs(v.norm_squared - 1.0) > NORM_TOL:
        raise NotNormalizedError(f"state has norm^2 {v.norm_squared:.15g}, expected 1")


def basis_ket(space: SpaceDescriptor, indices: Sequence[int]) -> StateVector:
    """|i_1 i_2 ...> with one 0-based index per subsystem, in declared order."""
    if len(indices) != len(space.subsystems):
        raise DimensionMismatchError(
            f"{len(indices)} basis indices for {len(space.subsystems)} subsystems"
        )
    for (label, dim), i in zip(space.subsystems, indices):
        if not 0 <= i < dim:
            raise DimensionMismatchError(f"basis index {i} out of range for {label!r} (dim {dim})")

    amps = np.zeros(space.total_dim, dtype=np.complex128)
    amps[np.ravel_multi_index(tuple(indices), tuple(space.dims))] = 1.0
    return StateVector(space, amps)


def state_from_amplitudes(space: SpaceDescriptor, amplitudes) -> StateVector:
    v = StateVector(space, amplitudes)
    require_normalized(v)
    return v


def max_entangled(d: int, labels: Tuple[str, str] = ("x", "y")) -> StateVector:
    """d^(-1/2) sum_i |i>|i> on a (d, d) pair; unit norm."""
    if d < 1:
        raise DimensionMismatchError(f"max_entangled needs d >= 1, got {d}")
    space = SpaceDescriptor(((labels[0], d), (labels[1], d)))
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return StateVector(space, amps)


def projector_from_vector(v: StateVector, label: str = "P") -> Projector:
    require_normalized(v)
    return Projector(np.outer(v.amplitudes, v.amplitudes.conj()), v.space, label, validate=False)


def density_from_vector(v: StateVector) -> ComplexMatrix:
    require_normalized(v)
    return _frozen(np.outer(v.amplitudes, v.amplitudes.conj()))


def identity_projector(space: SpaceDescriptor, label: str = "I") -> Projector:
    return Projector(identity(space.total_dim), space, label, validate=False)


def complement(p: Projector, label: str = None) -> Projector:
    """I - P"""
    return Projector(identity(p.space.total_dim) - p.op, p.space, label or f"1-{p.label}", validate=False)


def embed_projector(p: Projector, targets: Sequence[str], space: SpaceDescriptor,
                    label: str = None) -> Projector:
    return Projector(embed(p.op, targets, space), space, label or p.label, validate=False)


def spin_states() -> Tuple[StateVector, StateVector, StateVector, StateVector]:
    """(|up>, |down>, |+>, |->) on a single qubit, z basis."""
    space = SpaceDescriptor((("q", 2),))
    s = 1.0 / np.sqrt(2.0)
    up = StateVector(space, [1.0, 0.0])
    down = StateVector(space, [0.0, 1.0])
    plus = StateVector(space, [s, s])
    minus = StateVector(space, [s, -s])
    return up, down, plus, minus


def spin_projectors() -> Dict[str, Projector]:
    up, down, plus, minus = spin_states()
    return {
        "up": projector_from_vector(up, "up"),
        "down": projector_from_vector(down, "down"),
        "plus": projector_from_vector(plus, "plus"),
        "minus": projector_from_vector(minus, "minus"),
    }
