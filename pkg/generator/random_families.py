import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from quantum.hilbert import Projector, StateVector, density_from_vector
from quantum.histories import HistoryFamily, build_family
from quantum.linalg_core import ComplexMatrix, SpaceDescriptor

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
# post-selections closer to orthogonal than this are redrawn
MIN_OVERLAP = 1e-6
MAX_DRAWS = 1000


# -------------------------------
# STATES AND BASES
# -------------------------------

def random_space(rng: np.random.Generator, max_dim: int = 16) -> SpaceDescriptor:
    """One or two subsystems, total dimension at most ``max_dim``."""
    while True:
        dims = [int(rng.integers(2, 5)) for _ in range(int(rng.integers(1, 3)))]
        if int(np.prod(dims)) <= max_dim:
            return SpaceDescriptor(tuple((f"s{k}", dim) for k, dim in enumerate(dims)))


def random_state(rng: np.random.Generator, space: SpaceDescriptor) -> StateVector:
    n = space.total_dim
    amps = rng.normal(size=n) + 1j * rng.normal(size=n)
    return StateVector(space, amps / np.linalg.norm(amps))


def random_unitary(rng: np.random.Generator, n: int) -> ComplexMatrix:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    # fix column phases so the distribution is Haar
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_slot(rng: np.random.Generator, space: SpaceDescriptor, tag: str,
                n_outcomes: Optional[int] = None,
                basis: Optional[ComplexMatrix] = None) -> List[Projector]:
    """
    Split an orthonormal basis (random unless given) into ``n_outcomes``
    non-empty groups and return the projectors onto their spans. Slots cut
    from one shared basis commute.
    """
    n = space.total_dim
    if n_outcomes is None:
        n_outcomes = int(rng.integers(2, min(n, 4) + 1))
    n_outcomes = min(n_outcomes, n)
    if basis is None:
        basis = random_unitary(rng, n)

    order = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=n_outcomes - 1, replace=False))
    groups = np.split(order, cuts)

    projectors = []
    for k, group in enumerate(groups):
        columns = basis[:, group]
        projectors.append(Projector(columns @ columns.conj().T, space, f"{tag}{k}"))
    return projectors


# -------------------------------
# FAMILIES
# -------------------------------

@dataclass(frozen=True, eq=False)
class RandomScenario:
    space: SpaceDescriptor
    rho_i: ComplexMatrix
    rho_f: ComplexMatrix
    family: HistoryFamily
    psi_i: StateVector
    psi_f: StateVector


def random_scenario(rng: np.random.Generator, n_slots: Optional[int] = None,
                    max_dim: int = 16, slot_sizes: Optional[Sequence[int]] = None) -> RandomScenario:
    """Pure pre- and post-selection with tr[rho_i rho_f] > MIN_OVERLAP."""
    space = random_space(rng, max_dim)
    if slot_sizes is not None:
        n_slots = len(slot_sizes)
    elif n_slots is None:
        n_slots = int(rng.integers(1, 4))

    slots = [
        random_slot(rng, space, chr(ord("a") + i),
                    None if slot_sizes is None else slot_sizes[i])
        for i in range(n_slots)
    ]
    family = build_family(space, slots)

    for _ in range(MAX_DRAWS):
        psi_i = random_state(rng, space)
        psi_f = random_state(rng, space)
        if abs(psi_i.inner(psi_f)) ** 2 > MIN_OVERLAP:
            break
    else:
        raise RuntimeError(f"no compatible pre/post-selection after {MAX_DRAWS} draws")

    return RandomScenario(space, density_from_vector(psi_i), density_from_vector(psi_f),
                          family, psi_i, psi_f)


def random_scenarios(count: int, seed: int = DEFAULT_SEED, **kwargs) -> List[RandomScenario]:
    rng = np.random.default_rng(seed)
    out = [random_scenario(rng, **kwargs) for _ in range(count)]
    if out and logger.isEnabledFor(logging.DEBUG):
        logger.debug("generated %d random scenarios (seed %d):\n%s",
                     count, seed, family_summary(out).describe().to_string())
    return out


def family_summary(scenarios: Sequence[RandomScenario]) -> pd.DataFrame:
    return pd.DataFrame([
        {
            "dim": s.space.total_dim,
            "slots": len(s.family.slots),
            "chains": len(s.family.chains),
            "overlap": abs(s.psi_i.inner(s.psi_f)) ** 2,
        }
        for s in scenarios
    ])
