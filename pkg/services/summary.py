from typing import List

import pandas as pd

from models.models import Diagnostic, Report, SweepReport
from utils.format_utils import fmt, fmt_complex


def _decoherence_table(report: Report) -> pd.DataFrame:
    block = report.decoherence
    cells = [[fmt_complex(complex(re, im)) for re, im in row] for row in block.entries]
    return pd.DataFrame(cells, index=block.labels, columns=block.labels)


def _verdict_table(report: Report) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "condition": v.condition,
                "tol": fmt(v.tol),
                "consistent": "yes" if v.consistent else "no",
                "max_violation": fmt(v.max_violation),
                "worst_pair": f"({v.worst_pair[0]}, {v.worst_pair[1]})" if v.worst_pair else "-",
            }
            for v in report.consistency
        ]
    ).set_index("condition")


def _abl_table(report: Report) -> pd.DataFrame:
    rows = [{"history": o.label, "probability": fmt(o.probability)} for o in report.abl.outcomes]
    return pd.DataFrame(rows).set_index("history")


def render_report(report: Report) -> str:
    meta = report.scenario
    lines: List[str] = []

    space = ", ".join(f"{label}={dim}" for label, dim in meta.subsystems)
    lines.append(f"Scenario: {meta.name} ({meta.source}), schema {report.schema_version}")
    lines.append(f"Space: {space} (total dim {meta.total_dim})")
    if meta.params:
        params = ", ".join(
            f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in meta.params.items()
        )
        lines.append(f"Params: {params}")
    lines.append("")

    dec = report.decoherence
    if dec is not None:
        variant = f" [{dec.variant}]" if dec.variant else ""
        lines.append(
            f"Decoherence functional{variant}, tr[rho_i rho_f] = {fmt_complex(complex(*dec.norm_trace))}:"
        )
        lines.append(_decoherence_table(report).to_string())
        lines.append("")

    if report.consistency:
        lines.append("Consistency:")
        lines.append(_verdict_table(report).to_string())
        lines.append("")

    ch = report.ch
    if ch.status == "assigned":
        probs = ", ".join(f"{label}: {fmt(p)}" for label, p in ch.probabilities.items())
        lines.append(f"Consistent histories ({ch.condition}): {probs}")
    elif ch.status == "undefined":
        lines.append(f"Consistent histories ({ch.condition}): UNDEFINED, the functional cannot be normalized")
        lines.append(f"  {ch.detail}")
    else:
        lines.append(f"Consistent histories ({ch.condition}): NOT CONSISTENT, probabilities cannot be assigned")
        lines.append(f"  {ch.detail}")
    lines.append("")

    abl = report.abl
    variant = f" [{abl.variant}]" if abl.variant else ""
    lines.append(f"ABL distribution{variant}, denominator {fmt(abl.denominator)}:")
    lines.append(_abl_table(report).to_string())

    closed = report.closed_form
    if closed is not None:
        lines.append("")
        verdict = "agrees" if closed.agrees else "DISAGREES"
        lines.append(
            f"Closed form (d={closed.d}): {verdict}, max deviation {fmt(closed.max_abs_deviation)}"
        )
        table = pd.DataFrame(
            {
                "numeric": [fmt(p) for p in closed.numeric_probabilities] + [fmt(closed.numeric_offdiag_12)],
                "closed_form": [fmt(p) for p in closed.probabilities] + [fmt(closed.offdiag_12)],
                "exact": closed.probabilities_exact + [closed.offdiag_12_exact],
            },
            index=[f"p{k}" for k in range(1, len(closed.probabilities) + 1)] + ["D(1,2)"],
        )
        lines.append(table.to_string())

    if report.timing is not None:
        lines.append("")
        lines.append(
            f"Timing: build {report.timing.build_seconds:.3f}s, "
            f"analysis {report.timing.analysis_seconds:.3f}s"
        )

    return "\n".join(lines) + "\n"


def render_sweep(sweep: SweepReport) -> str:
    frame = pd.DataFrame([row.model_dump() for row in sweep.rows]).set_index("d")
    frame = frame.apply(lambda col: col.map(fmt) if col.name != "dim" else col)
    verdict = "all rows agree" if sweep.agrees else "DISAGREEMENT above tolerance"
    return f"HM closed-form sweep: {verdict}\n{frame.to_string()}\n"


def render_diagnostics(diagnostics: List[Diagnostic]) -> str:
    if not diagnostics:
        return "ok: no diagnostics\n"
    lines = [f"{d.code} at {d.location}: {d.message}" for d in diagnostics]
    lines.append(f"{len(diagnostics)} problem(s)")
    return "\n".join(lines) + "\n"
