"""
ABL probabilities for pre- and post-selected systems.

Three forms share one result type:
- abl_pure:        |<psi_f|A_k|psi_i>|^2 / sum_j |<psi_f|A_j|psi_i>|^2
- abl_general:     tr(Pi_f P_k Pi_i rho Pi_i P_k) / sum_j (same)
- abl_over_family: tr[rho_f C_a rho_i C_a^dagger] / sum_b (same), i.e. the
                   normalized diagonal of the decoherence functional.

Unlike the consistent-histories rule these never refuse; the only failure is
a vanishing denominator (post-selection impossible).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from config.settings import ZERO_THRESHOLD
from quantum.hilbert import Projector, StateVector, require_normalized
from quantum.histories import HistoryFamily, check_slot, functional_entries
from quantum.linalg_core import as_matrix
from utils.errors import DimensionMismatchError, NegativeWeightError, ZeroDenominatorError

logger = logging.getLogger(__name__)

NEGATIVE_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class AblDistribution:
    outcomes: Tuple[Tuple[str, float], ...]
    denominator: float

    @property
    def labels(self) -> List[str]:
        return [label for label, _ in self.outcomes]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.outcomes])

    def probability(self, label: str) -> float:
        return dict(self.outcomes)[label]

    def as_dict(self) -> Dict[str, float]:
        return dict(self.outcomes)


def _normalize(labels: Sequence[str], weights: Sequence[float]) -> AblDistribution:
    weights = np.asarray(weights, dtype=float)
    denominator = float(np.sum(weights))
    if abs(denominator) < ZERO_THRESHOLD:
        raise ZeroDenominatorError(
            f"ABL denominator {denominator:.3e}: the post-selection is impossible "
            f"given the intermediate measurement"
        )
    probabilities = weights / denominator
    return AblDistribution(tuple(zip(labels, (float(p) for p in probabilities))), denominator)


def _check_weights(labels: Sequence[str], weights: np.ndarray) -> np.ndarray:
    for label, w in zip(labels, weights):
        if w < -NEGATIVE_WEIGHT_TOL:
            raise NegativeWeightError(
                f"outcome {label!r} has weight {w:.3e} < 0; inputs are outside the ABL rule's regime"
            )
    # rounding noise below the tolerance
    return np.where(weights < 0.0, 0.0, weights)


def abl_pure(psi_i: StateVector, psi_f: StateVector,
             decomposition: Sequence[Projector]) -> AblDistribution:
    require_normalized(psi_i)
    require_normalized(psi_f)
    if psi_i.space != psi_f.space:
        raise DimensionMismatchError("pre- and post-selected states live on different spaces")
    check_slot(0, decomposition, psi_i.space)

    amplitudes = [np.vdot(psi_f.amplitudes, p.op @ psi_i.amplitudes) for p in decomposition]
    weights = np.array([abs(a) ** 2 for a in amplitudes], dtype=float)
    return _normalize([p.label for p in decomposition], weights)


def abl_general(rho, Pi_i: Projector, Pi_f: Projector,
                measurement: Sequence[Projector]) -> AblDistribution:
    """
    Weight of outcome k is tr(Pi_f P_k Pi_i rho Pi_i P_k Pi_f): preparation,
    measurement and post-selection applied in time order. For pure rho with
    Pi_i = |psi_i><psi_i| and Pi_f = |psi_f><psi_f| this is |<psi_f|P_k|psi_i>|^2.
    Cycling the trace gives tr(P_k Pi_i rho Pi_i P_k Pi_f), which for P_k = I and
    Pi_i = Pi_f = I reduces to the unsandwiched tr(P_k Pi_i rho Pi_f) = tr(rho).
    Real parts are taken; a materially negative weight (non-PSD rho) is an error.
    """
    rho = as_matrix(rho)
    n = rho.shape[0]
    for p in (Pi_i, Pi_f, *measurement):
        if p.op.shape != (n, n):
            raise DimensionMismatchError(f"operator {p.label!r} does not act on the state's space")

    prepared = Pi_i.op @ rho @ Pi_i.op
    post_t = Pi_f.op.T
    weights = np.array([np.sum(post_t * (p.op @ prepared @ p.op)).real for p in measurement])
    labels = [p.label for p in measurement]
    weights = _check_weights(labels, weights)
    return _normalize(labels, weights)


def abl_over_family(family: HistoryFamily, rho_i, rho_f) -> AblDistribution:
    # no tr[rho_i rho_f] normalization: an intermediate measurement can make an
    # otherwise orthogonal post-selection possible
    weights = np.real(np.diag(functional_entries(family, rho_i, rho_f, diagonal_only=True)))
    weights = _check_weights(family.labels, weights)
    distribution = _normalize(family.labels, weights)
    logger.debug("ABL over %d histories, denominator %.6g", len(weights), distribution.denominator)
    return distribution
