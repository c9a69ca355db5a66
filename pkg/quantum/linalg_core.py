"""
Dense complex matrix arithmetic and multipartite tensor bookkeeping.

Conventions used everywhere in the package:
- matrices are complex128 numpy arrays, row-major;
- Kronecker products put the left operand's indices on the slow axis;
- subsystems are referenced by label, never by position.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from config.settings import DEFAULT_TOL
from utils.errors import (
    DimensionMismatchError,
    DuplicateLabelError,
    NonFiniteError,
    NonSquareError,
    UnknownLabelError,
)

ComplexMatrix = NDArray[np.complex128]


@dataclass(frozen=True)
class SpaceDescriptor:
    """Ordered labeled subsystems. List order is the tensor-factor order."""

    subsystems: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        subsystems = tuple((str(label), int(dim)) for label, dim in self.subsystems)
        object.__setattr__(self, "subsystems", subsystems)

        labels = [label for label, _ in subsystems]
        if len(set(labels)) != len(labels):
            raise DuplicateLabelError(f"duplicate subsystem labels in {labels}")
        for label, dim in subsystems:
            if dim < 1:
                raise DimensionMismatchError(f"subsystem {label!r} has dimension {dim}")

    @classmethod
    def of(cls, *subsystems: Tuple[str, int]) -> "SpaceDescriptor":
        return cls(tuple(subsystems))

    @property
    def labels(self) -> List[str]:
        return [label for label, _ in self.subsystems]

    @property
    def dims(self) -> List[int]:
        return [dim for _, dim in self.subsystems]

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.subsystems else 1

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(f"unknown subsystem label {label!r}; declared: {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.subsystems[self.index_of(label)][1]

    def dims_of(self, labels: Iterable[str]) -> int:
        return int(np.prod([self.dim_of(label) for label in labels], dtype=np.int64))


def as_matrix(a) -> ComplexMatrix:
    """Coerce to a 2-D complex128 array and reject NaN/Inf."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    return m


def identity(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=np.complex128)


def tensor(a, b) -> ComplexMatrix:
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(*ops) -> ComplexMatrix:
    return reduce(tensor, ops)


def dagger(a) -> ComplexMatrix:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NonSquareError(f"trace undefined for a {m.shape[0]}x{m.shape[1]} matrix")
    return complex(np.trace(m))


def max_abs(a) -> float:
    m = np.asarray(a)
    return float(np.max(np.abs(m))) if m.size else 0.0


def allclose(a, b, tol: float = DEFAULT_TOL) -> bool:
    a, b = as_matrix(a), as_matrix(b)
    return a.shape == b.shape and max_abs(a - b) <= tol


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(a)
    return m.shape[0] == m.shape[1] and max_abs(m - m.conj().T) <= tol


def embed(op, targets: Sequence[str], space: SpaceDescriptor) -> ComplexMatrix:
    """
    Lift ``op`` (acting on ``targets`` in the given order) to the full space,
    identity on every other subsystem.

    Works by building op ⊗ I in the permuted factor order (targets first,
    the rest in declared order) and transposing the tensor axes back.
    """
    m = as_matrix(op)
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise DuplicateLabelError(f"embed targets must be distinct, got {targets}")

    positions = [space.index_of(label) for label in targets]
    target_dim = space.dims_of(targets)
    if m.shape != (target_dim, target_dim):
        raise DimensionMismatchError(
            f"operator of shape {m.shape} cannot act on {targets} (dim {target_dim})"
        )

    n = len(space.subsystems)
    rest = [i for i in range(n) if i not in positions]
    perm = positions + rest
    dims = space.dims
    rest_dim = int(np.prod([dims[i] for i in rest], dtype=np.int64)) if rest else 1

    full = np.kron(m, identity(rest_dim))
    if perm == list(range(n)):
        return full

    permuted_dims = [dims[i] for i in perm]
    inverse = np.argsort(perm)
    axes = [int(inverse[i]) for i in range(n)] + [n + int(inverse[i]) for i in range(n)]
    full = full.reshape(permuted_dims + permuted_dims).transpose(axes)
    total = space.total_dim
    return np.ascontiguousarray(full.reshape(total, total))
