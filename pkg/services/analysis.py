import logging
import time
from typing import Optional

import numpy as np

from config.settings import DEFAULT_TOL
from models.models import (
    AblBlock,
    ChBlock,
    ClosedFormBlock,
    DecoherenceBlock,
    Outcome,
    Report,
    ScenarioMeta,
    SweepReport,
    SweepRow,
    TimingBlock,
    VerdictBlock,
)
from quantum.histories import (
    ConsistencyCondition,
    ConsistencyVerdict,
    DecoherenceMatrix,
    assign_probabilities,
    check_consistency,
    decoherence_matrix,
)
from quantum.tsvf import AblDistribution, abl_over_family
from scenarios.builtin import Scenario, hm_sweep
from utils.errors import NotConsistentError, ZeroNormalizationError
from utils.format_utils import complex_pair, matrix_pairs, round_sig

logger = logging.getLogger(__name__)

# numeric engine vs closed forms
CLOSED_FORM_TOL = 1e-9


def _verdict_block(verdict: ConsistencyVerdict) -> VerdictBlock:
    return VerdictBlock(
        condition=verdict.condition.value,
        tol=verdict.tol,
        consistent=verdict.consistent,
        max_violation=round_sig(verdict.max_violation),
        worst_pair=verdict.worst_pair,
    )


def _params(scenario: Scenario) -> dict:
    out = {}
    for key, value in sorted(scenario.params.items()):
        out[key] = round_sig(value) if isinstance(value, float) else value
    return out


def _ch_block(D: DecoherenceMatrix, condition: ConsistencyCondition, tol: float) -> ChBlock:
    try:
        probabilities = assign_probabilities(D, tol, condition)
    except NotConsistentError as e:
        return ChBlock(status="not_consistent", condition=condition.value, detail=e.detail)
    return ChBlock(
        status="assigned",
        condition=condition.value,
        probabilities={label: round_sig(p) for label, p in probabilities.items()},
    )


def _closed_form_block(scenario: Scenario, D: DecoherenceMatrix,
                       abl: AblDistribution) -> Optional[ClosedFormBlock]:
    closed = scenario.closed_form()
    if closed is None:
        return None

    numeric = abl.probabilities
    numeric_offdiag = D.entry("1", "2")
    deviation = max(
        float(np.max(np.abs(numeric - np.array(closed.probabilities)))),
        abs(numeric_offdiag - closed.offdiag_12),
    )
    return ClosedFormBlock(
        d=closed.d,
        probabilities=[round_sig(p) for p in closed.probabilities],
        probabilities_exact=[str(p) for p in closed.exact_probabilities],
        offdiag_12=round_sig(closed.offdiag_12),
        offdiag_12_exact=str(closed.exact_offdiag_12),
        numeric_probabilities=[round_sig(p) for p in numeric],
        numeric_offdiag_12=round_sig(numeric_offdiag.real),
        max_abs_deviation=round_sig(deviation),
        agrees=deviation <= CLOSED_FORM_TOL,
    )


def analyze(scenario: Scenario, source: str = "builtin",
            condition: ConsistencyCondition = ConsistencyCondition.FULL_DIAGONALITY,
            tol: float = DEFAULT_TOL, build_seconds: Optional[float] = None) -> Report:
    """
    ``build_seconds`` switches the timing block on; without it the report is
    byte-stable across runs.

    When tr[rho_i rho_f] vanishes the functional is undefined: the report then
    has no decoherence block, no verdicts and ch.status "undefined", but the
    ABL distribution is still computed.
    """
    started = time.perf_counter()

    ch = scenario.ch_view()
    conditions = [ConsistencyCondition.FULL_DIAGONALITY, ConsistencyCondition.REAL_PART_ONLY]
    if condition not in conditions:
        conditions.append(condition)
    try:
        D = decoherence_matrix(ch.family, ch.rho_i, ch.rho_f)
    except ZeroNormalizationError as e:
        logger.warning("%s: %s", scenario.name, e.detail)
        D = None
        verdicts = []
        ch_block = ChBlock(status="undefined", condition=condition.value, detail=e.detail)
    else:
        verdicts = [check_consistency(D, c, tol) for c in conditions]
        ch_block = _ch_block(D, condition, tol)

    abl = abl_over_family(scenario.family, scenario.rho_i, scenario.rho_f)
    analysis_seconds = time.perf_counter() - started
    logger.info("analyzed %s (dim %d) in %.3fs", scenario.name, scenario.space.total_dim, analysis_seconds)

    timing = None
    if build_seconds is not None:
        timing = TimingBlock(build_seconds=round_sig(build_seconds),
                             analysis_seconds=round_sig(analysis_seconds))

    decoherence = None
    if D is not None:
        decoherence = DecoherenceBlock(
            variant=ch.params.get("variant"),
            labels=D.labels,
            entries=matrix_pairs(D.entries),
            norm_trace=complex_pair(D.norm_trace),
        )

    return Report(
        scenario=ScenarioMeta(
            name=scenario.name,
            source=source,
            subsystems=list(scenario.space.subsystems),
            total_dim=scenario.space.total_dim,
            params=_params(scenario),
        ),
        decoherence=decoherence,
        consistency=[_verdict_block(v) for v in verdicts],
        ch=ch_block,
        abl=AblBlock(
            variant=scenario.params.get("variant"),
            outcomes=[Outcome(label=label, probability=round_sig(p)) for label, p in abl.outcomes],
            denominator=round_sig(abl.denominator),
        ),
        closed_form=None if D is None else _closed_form_block(scenario, D, abl),
        timing=timing,
    )


def sweep_report(d_min: int, d_max: int) -> SweepReport:
    table = hm_sweep(range(d_min, d_max + 1))
    rows = [
        SweepRow(**{key: (int(value) if key in ("d", "dim") else round_sig(value))
                    for key, value in record.items()})
        for record in table.to_dict(orient="records")
    ]
    agrees = bool((table["max_abs_deviation"] <= CLOSED_FORM_TOL).all())
    return SweepReport(rows=rows, agrees=agrees)
