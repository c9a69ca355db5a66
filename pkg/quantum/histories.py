"""
History chains, class operators and the decoherence functional

    D(a, a') = tr[rho_f C_a rho_i C_a'^dagger] / tr[rho_i rho_f]

together with consistency verdicts and the consistent-histories probability
rule P(a) = D(a, a), which is only applied when D is diagonal.

Naming of consistency conditions varies across the literature. Here:
- FULL_DIAGONALITY: every off-diagonal complex entry vanishes (the "strong"
  condition). MEDIUM is the same test at a caller-chosen tolerance,
  D(a, b) ~ delta_ab P(a).
- REAL_PART_ONLY: only Re D(a, b) must vanish (the weakest standard condition).
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_TOL, ZERO_THRESHOLD
from quantum.hilbert import Projector
from quantum.linalg_core import (
    ComplexMatrix,
    SpaceDescriptor,
    allclose,
    as_matrix,
    identity,
    is_hermitian,
    max_abs,
)
from utils.errors import (
    DimensionMismatchError,
    NotConsistentError,
    SlotNotExclusiveError,
    SlotNotExhaustiveError,
    SpecError,
    ZeroNormalizationError,
)

logger = logging.getLogger(__name__)

# sum-to-one and marginal checks on O(1) probabilities
SUM_TOL = 1e-9

# relative cutoff for dropping directions when factoring rho_i
FACTOR_TOL = 1e-13


class ConsistencyCondition(Enum):
    FULL_DIAGONALITY = "full"
    REAL_PART_ONLY = "real"
    MEDIUM = "medium"


@dataclass(frozen=True, eq=False)
class HistoryChain:
    """Time-ordered projectors, earliest first."""

    label: str
    projectors: Tuple[Projector, ...]

    def __post_init__(self):
        projectors = tuple(self.projectors)
        if not projectors:
            raise SpecError(f"history chain {self.label!r} is empty")
        space = projectors[0].space
        for p in projectors[1:]:
            if p.space != space:
                raise DimensionMismatchError(
                    f"history chain {self.label!r} mixes projectors on different spaces"
                )
        object.__setattr__(self, "projectors", projectors)

    @property
    def space(self) -> SpaceDescriptor:
        return self.projectors[0].space

    @property
    def steps(self) -> List[str]:
        return [p.label for p in self.projectors]


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    space: SpaceDescriptor
    slots: Tuple[Tuple[Projector, ...], ...]
    chains: Tuple[HistoryChain, ...]

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.chains]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(slot) for slot in self.slots)

    def chain(self, label: str) -> HistoryChain:
        for c in self.chains:
            if c.label == label:
                return c
        raise KeyError(label)


@dataclass(frozen=True, eq=False)
class DecoherenceMatrix:
    family: HistoryFamily
    entries: ComplexMatrix
    norm_trace: complex

    @property
    def labels(self) -> List[str]:
        return self.family.labels

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries))

    def entry(self, a: str, b: str) -> complex:
        labels = self.labels
        return complex(self.entries[labels.index(a), labels.index(b)])


@dataclass(frozen=True)
class ConsistencyVerdict:
    condition: ConsistencyCondition
    tol: float
    consistent: bool
    max_violation: float
    worst_pair: Optional[Tuple[str, str]] = field(default=None)


def class_operator(chain: HistoryChain) -> ComplexMatrix:
    """C = P_n ... P_2 P_1 (latest leftmost)."""
    c = chain.projectors[0].op
    for p in chain.projectors[1:]:
        if p.op.shape != c.shape:
            raise DimensionMismatchError(f"chain {chain.label!r} has mismatched projector shapes")
        c = p.op @ c
    return c


def check_slot(index: int, slot: Sequence[Projector], space: SpaceDescriptor) -> None:
    n = space.total_dim
    for p in slot:
        if p.space != space:
            raise DimensionMismatchError(f"slot {index} projector {p.label!r} is on a different space")

    total = np.zeros((n, n), dtype=np.complex128)
    for p in slot:
        total = total + p.op
    deviation = max_abs(total - identity(n))
    if deviation > DEFAULT_TOL:
        raise SlotNotExhaustiveError(index, deviation)

    for j, k in itertools.combinations(range(len(slot)), 2):
        overlap = max_abs(slot[j].op @ slot[k].op)
        if overlap > DEFAULT_TOL:
            raise SlotNotExclusiveError(index, (j, k), overlap)


def build_family(space: SpaceDescriptor, slots: Sequence[Sequence[Projector]],
                 labels: Optional[Sequence[str]] = None) -> HistoryFamily:
    """
    Validate each slot (exhaustive and exclusive) and enumerate the Cartesian
    product of slot choices, the first slot varying slowest.
    Default chain labels join the projector labels with commas.
    """
    if not slots:
        raise SpecError("a history family needs at least one slot")
    slots = tuple(tuple(slot) for slot in slots)
    for i, slot in enumerate(slots):
        if not slot:
            raise SpecError(f"slot {i} is empty")
        check_slot(i, slot, space)

    combos = list(itertools.product(*slots))
    if labels is None:
        labels = [",".join(p.label for p in combo) for combo in combos]
    elif len(labels) != len(combos):
        raise SpecError(f"{len(labels)} chain labels for {len(combos)} chains")
    if len(set(labels)) != len(labels):
        raise SpecError(f"chain labels are not unique: {list(labels)}")

    chains = tuple(HistoryChain(str(label), combo) for label, combo in zip(labels, combos))
    logger.debug("built family with slot sizes %s on dim %d", [len(s) for s in slots], space.total_dim)
    return HistoryFamily(space, slots, chains)


def _states_for(family: HistoryFamily, rho_i, rho_f) -> Tuple[ComplexMatrix, ComplexMatrix]:
    rho_i, rho_f = as_matrix(rho_i), as_matrix(rho_f)
    n = family.space.total_dim
    if rho_i.shape != (n, n) or rho_f.shape != (n, n):
        raise DimensionMismatchError(
            f"states of shape {rho_i.shape}/{rho_f.shape} on a family of dimension {n}"
        )
    return rho_i, rho_f


def _factor_state(rho: ComplexMatrix) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Thin factors with rho = left @ right^dagger. PSD states go through
    pivoted Cholesky, whose cost grows with the rank; other hermitian
    states through eigh; anything else stays dense.
    """
    n = rho.shape[0]
    if not is_hermitian(rho, DEFAULT_TOL):
        return rho, identity(n)

    scale = max(max_abs(rho), 1.0)
    cutoff = FACTOR_TOL * scale
    factor = np.zeros((n, min(n, 8)), dtype=np.complex128)
    residual = np.real(np.diag(rho)).copy()
    rank = 0
    while rank < n:
        pivot = int(np.argmax(residual))
        if residual[pivot] <= cutoff:
            break
        if rank == factor.shape[1]:
            factor = np.hstack([factor, np.zeros((n, min(rank, n - rank)), dtype=np.complex128)])
        col = rho[:, pivot] - factor[:, :rank] @ np.conj(factor[pivot, :rank])
        col = col / np.sqrt(residual[pivot])
        factor[:, rank] = col
        residual -= np.abs(col) ** 2
        rank += 1
    factor = factor[:, :rank]
    if allclose(factor @ factor.conj().T, rho, cutoff * n):
        return factor, factor

    values, vectors = np.linalg.eigh(rho)
    keep = np.abs(values) > cutoff
    return vectors[:, keep] * values[keep], vectors[:, keep]


def _apply_chain(chain: HistoryChain, block: ComplexMatrix) -> ComplexMatrix:
    """C @ block, one projector at a time, earliest first."""
    for p in chain.projectors:
        if p.op.shape[1] != block.shape[0]:
            raise DimensionMismatchError(f"chain {chain.label!r} has mismatched projector shapes")
        block = p.op @ block
    return block


def functional_entries(family: HistoryFamily, rho_i, rho_f,
                       diagonal_only: bool = False) -> ComplexMatrix:
    """
    Unnormalized tr[rho_f C_a rho_i C_b^dagger]. With rho_i = L R^dagger this is
    the sum over columns of conj(C_b R) * (rho_f C_a L), so class operators
    are never formed and each chain carries n x rank blocks only.
    With ``diagonal_only`` the off-diagonal entries are left at zero.
    """
    rho_i, rho_f = _states_for(family, rho_i, rho_f)
    left, right = _factor_state(rho_i)

    reached = [_apply_chain(c, left) for c in family.chains]
    carried = reached if right is left else [_apply_chain(c, right) for c in family.chains]
    pushed = [rho_f @ w for w in reached]

    size = len(family.chains)
    entries = np.zeros((size, size), dtype=np.complex128)
    for a in range(size):
        columns = [a] if diagonal_only else range(size)
        for b in columns:
            entries[a, b] = np.sum(np.conj(carried[b]) * pushed[a])
    return entries


def decoherence_matrix(family: HistoryFamily, rho_i, rho_f) -> DecoherenceMatrix:
    rho_i, rho_f = _states_for(family, rho_i, rho_f)

    # tr[rho_i rho_f] without forming the product
    norm_trace = complex(np.sum(rho_i * rho_f.T))
    if abs(norm_trace) < ZERO_THRESHOLD:
        raise ZeroNormalizationError(
            f"tr[rho_i rho_f] = {norm_trace:.3e}: initial and final states are incompatible"
        )

    entries = functional_entries(family, rho_i, rho_f) / norm_trace
    entries.flags.writeable = False

    logger.debug("decoherence matrix %dx%d, tr[rho_i rho_f] = %s", *entries.shape, norm_trace)
    return DecoherenceMatrix(family, entries, norm_trace)


def check_consistency(D: DecoherenceMatrix,
                      condition: ConsistencyCondition = ConsistencyCondition.FULL_DIAGONALITY,
                      tol: float = DEFAULT_TOL) -> ConsistencyVerdict:
    size = D.entries.shape[0]
    if condition is ConsistencyCondition.REAL_PART_ONLY:
        magnitude = np.abs(D.entries.real)
    else:
        magnitude = np.abs(D.entries)

    off = magnitude.copy()
    off[np.diag_indices(size)] = 0.0
    if size < 2 or not np.any(off):
        return ConsistencyVerdict(condition, tol, True, 0.0, None)

    # argmax returns the first occurrence in row-major order
    a, b = np.unravel_index(int(np.argmax(off)), off.shape)
    worst = float(off[a, b])
    labels = D.labels
    verdict = ConsistencyVerdict(condition, tol, worst <= tol, worst, (labels[a], labels[b]))
    logger.info("consistency (%s, tol=%g): max violation %.3e at %s",
                condition.value, tol, worst, verdict.worst_pair)
    return verdict


def assign_probabilities(D: DecoherenceMatrix, tol: float = DEFAULT_TOL,
                         condition: ConsistencyCondition = ConsistencyCondition.FULL_DIAGONALITY,
                         ) -> Dict[str, float]:
    """P(a) = D(a, a), or NotConsistentError when D fails ``condition`` within tol."""
    verdict = check_consistency(D, condition, tol)
    if not verdict.consistent:
        raise NotConsistentError(verdict)

    probabilities = {label: float(p) for label, p in zip(D.labels, D.diagonal)}
    total = sum(probabilities.values())
    if abs(total - 1.0) > SUM_TOL:
        logger.warning("consistent family probabilities sum to %.12g", total)
    return probabilities


def marginalize(probabilities: Dict[str, float], family: HistoryFamily,
                drop_slot: int) -> Dict[Tuple[str, ...], float]:
    """
    Sum a distribution over the outcomes of one slot. Keys of the result are
    the projector labels of the remaining slots, in time order.
    """
    if not 0 <= drop_slot < len(family.slots):
        raise SpecError(f"slot {drop_slot} out of range for a family with {len(family.slots)} slots")

    marginal: Dict[Tuple[str, ...], float] = {}
    for chain in family.chains:
        key = tuple(step for i, step in enumerate(chain.steps) if i != drop_slot)
        marginal[key] = marginal.get(key, 0.0) + probabilities[chain.label]
    return marginal


def born_probabilities(rho, projectors: Sequence[Projector]) -> Dict[str, float]:
    """tr[P_k rho]"""
    rho = as_matrix(rho)
    return {p.label: float(np.sum(p.op * rho.T).real) for p in projectors}
