"""
The two worked examples, packaged as executable ground truth.

``spin``: a qubit pre-selected in |+>. The ABL reading measures z once and
post-selects |+>; the consistent-histories reading uses histories z-then-x
with rho_f = I.

``hm``: the final-state black hole model on subsystems (r_b_tilde, r_b,
b_tilde, b), each of dimension d. The observer first checks that r_b and b
are maximally entangled, then that b_tilde and b are.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from config.settings import DEFAULT_TOL
from quantum.hilbert import (
    complement,
    density_from_vector,
    embed_projector,
    max_entangled,
    projector_from_vector,
    spin_projectors,
    spin_states,
)
from quantum.histories import HistoryFamily, build_family, decoherence_matrix
from quantum.linalg_core import ComplexMatrix, SpaceDescriptor, embed, identity, is_hermitian, tensor
from quantum.tsvf import abl_over_family
from utils.errors import DegenerateDimensionError, SpecError

logger = logging.getLogger(__name__)

HM_LABELS = ("r_b_tilde", "r_b", "b_tilde", "b")
HM_CHAIN_LABELS = ("1", "2", "3", "4")
SCENARIO_NAMES = ("spin", "hm")


@dataclass(frozen=True)
class HmClosedForms:
    d: int
    exact_probabilities: Tuple[Fraction, Fraction, Fraction, Fraction]
    exact_offdiag_12: Fraction

    @property
    def probabilities(self) -> Tuple[float, float, float, float]:
        return tuple(float(p) for p in self.exact_probabilities)

    @property
    def offdiag_12(self) -> float:
        return float(self.exact_offdiag_12)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    space: SpaceDescriptor
    rho_i: ComplexMatrix
    rho_f: ComplexMatrix
    family: HistoryFamily
    params: Dict[str, Any] = field(default_factory=dict)
    # the history family the consistent-histories analysis uses, when it differs
    ch_reading: Optional["Scenario"] = None

    def __post_init__(self):
        n = self.space.total_dim
        for name, rho in (("rho_i", self.rho_i), ("rho_f", self.rho_f)):
            if rho.shape != (n, n):
                raise SpecError(f"{name} of shape {rho.shape} on a space of dimension {n}")
            if not is_hermitian(rho, DEFAULT_TOL):
                raise SpecError(f"{name} of scenario {self.name!r} is not hermitian")
        tr = complex(np.trace(self.rho_i))
        if abs(tr - 1.0) > DEFAULT_TOL:
            raise SpecError(f"rho_i of scenario {self.name!r} has trace {tr}, expected 1")

    def ch_view(self) -> "Scenario":
        return self.ch_reading or self

    def closed_form(self) -> Optional[HmClosedForms]:
        if self.name == "hm" and "d" in self.params and not self.params.get("swap_order", False):
            return hm_closed_forms(int(self.params["d"]))
        return None


def spin_scenario() -> Scenario:
    _, _, plus, _ = spin_states()
    p = spin_projectors()
    space = plus.space
    rho_plus = density_from_vector(plus)

    two_slot = Scenario(
        name="spin",
        space=space,
        rho_i=rho_plus,
        rho_f=identity(space.total_dim),
        family=build_family(space, [[p["up"], p["down"]], [p["plus"], p["minus"]]]),
        params={"variant": "two_slot"},
    )
    return Scenario(
        name="spin",
        space=space,
        rho_i=rho_plus,
        rho_f=rho_plus,
        family=build_family(space, [[p["up"], p["down"]]]),
        params={"variant": "pre_post", "ch_variant": "two_slot"},
        ch_reading=two_slot,
    )


def _require_hm_dimension(d: int) -> None:
    if int(d) != d or d < 2:
        raise DegenerateDimensionError(f"the hm scenario needs an integer d >= 2, got {d}")


def hm_scenario(d: int, swap_order: bool = False) -> Scenario:
    """
    rho_i = |Phi><Phi|_(r_b_tilde, r_b) (x) |Phi><Phi|_(b_tilde, b)
    rho_f = |Phi><Phi|_(r_b_tilde, b_tilde) (x) I_(r_b, b), rescaled so tr[rho_i rho_f] = 1

    Histories: first {Pi_(r_b,b), 1 - Pi_(r_b,b)}, then {Pi_(b_tilde,b), 1 - Pi_(b_tilde,b)},
    labeled 1..4 as C1 = Pi Pi, C2 = (1-Pi)Pi, C3 = Pi(1-Pi), C4 = (1-Pi)(1-Pi).
    ``swap_order`` measures the (b_tilde, b) pair first; its chains keep the
    default projector-label names.
    """
    _require_hm_dimension(d)
    d = int(d)
    space = SpaceDescriptor(tuple((label, d) for label in HM_LABELS))

    phi = max_entangled(d)
    phi_density = density_from_vector(phi)
    rho_i = tensor(phi_density, phi_density)
    rho_f_raw = embed(phi_density, ["r_b_tilde", "b_tilde"], space)

    overlap = complex(np.sum(rho_i * rho_f_raw.T))
    scale = 1.0 / overlap.real
    rho_f = scale * rho_f_raw

    phi_projector = projector_from_vector(phi, "Pi")
    pi_rb_b = embed_projector(phi_projector, ["r_b", "b"], space, "Pi[r_b,b]")
    pi_bt_b = embed_projector(phi_projector, ["b_tilde", "b"], space, "Pi[b_tilde,b]")
    first = [pi_rb_b, complement(pi_rb_b)]
    second = [pi_bt_b, complement(pi_bt_b)]

    if swap_order:
        family = build_family(space, [second, first])
    else:
        family = build_family(space, [first, second], labels=HM_CHAIN_LABELS)

    logger.info("hm scenario d=%d (dim %d), rho_f scale %.12g", d, space.total_dim, scale)
    return Scenario(
        name="hm",
        space=space,
        rho_i=rho_i,
        rho_f=rho_f,
        family=family,
        params={"d": d, "rho_f_scale": scale, "swap_order": bool(swap_order)},
    )


def hm_closed_forms(d: int) -> HmClosedForms:
    """
    p1 = 1 / (3d^4 - 6d^2 + 4), p2 = p3 = p4 = (d^2 - 1)^2 / (3d^4 - 6d^2 + 4),
    D(1,2) = 1/d^2 - 1/d^4; exact rationals until the caller asks for floats.
    """
    _require_hm_dimension(d)
    d = int(d)
    denominator = 3 * d ** 4 - 6 * d ** 2 + 4
    p1 = Fraction(1, denominator)
    rest = Fraction((d ** 2 - 1) ** 2, denominator)
    offdiag = Fraction(1, d ** 2) - Fraction(1, d ** 4)
    return HmClosedForms(d, (p1, rest, rest, rest), offdiag)


def get_scenario(name: str, d: int = 2, swap_order: bool = False) -> Scenario:
    if name == "spin":
        return spin_scenario()
    if name == "hm":
        return hm_scenario(d, swap_order=swap_order)
    raise SpecError(f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}")


def hm_sweep(d_values: Iterable[int]) -> pd.DataFrame:
    """Numeric engine against the closed forms, one row per d."""
    rows = []
    for d in d_values:
        scenario = hm_scenario(d)
        closed = hm_closed_forms(d)
        abl = abl_over_family(scenario.family, scenario.rho_i, scenario.rho_f)
        D = decoherence_matrix(scenario.family, scenario.rho_i, scenario.rho_f)

        numeric = abl.probabilities
        offdiag = D.entry("1", "2").real
        rows.append({
            "d": d,
            "dim": scenario.space.total_dim,
            "p1": numeric[0],
            "p1_closed": closed.probabilities[0],
            "p2": numeric[1],
            "p2_closed": closed.probabilities[1],
            "offdiag_12": offdiag,
            "offdiag_12_closed": closed.offdiag_12,
            "max_abs_deviation": max(
                float(np.max(np.abs(numeric - np.array(closed.probabilities)))),
                abs(offdiag - closed.offdiag_12),
            ),
        })
    return pd.DataFrame(rows)
