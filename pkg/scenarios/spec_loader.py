"""Load, type-check and compile declarative scenario files."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from models.models import (
    AmplitudesExpr,
    BasisKetExpr,
    ComplementProjectorExpr,
    DensitySpec,
    Diagnostic,
    IdentityFactor,
    IdentityProjectorExpr,
    MaxEntangledExpr,
    ScenarioSpec,
    StateProjectorExpr,
)
from quantum.hilbert import (
    NORM_TOL,
    Projector,
    StateVector,
    basis_ket,
    complement,
    density_from_vector,
    embed_projector,
    identity_projector,
    max_entangled,
    projector_from_vector,
    state_from_amplitudes,
)
from quantum.histories import build_family, check_slot
from quantum.linalg_core import ComplexMatrix, SpaceDescriptor, embed, identity, tensor_all
from scenarios.builtin import Scenario
from utils.errors import (
    AnalysisError,
    DimensionMismatchError,
    DuplicateLabelError,
    NotNormalizedError,
    SlotNotExclusiveError,
    SlotNotExhaustiveError,
    SpecError,
    UnknownLabelError,
)

logger = logging.getLogger(__name__)

StateExprT = Union[BasisKetExpr, MaxEntangledExpr, AmplitudesExpr]

_ERRORS_BY_CODE = {
    cls.code: cls
    for cls in (UnknownLabelError, DuplicateLabelError, DimensionMismatchError, NotNormalizedError)
}


def load_spec(path: Union[str, Path]) -> ScenarioSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read spec file {path}: {e}")
    try:
        return ScenarioSpec.model_validate_json(text)
    except ValidationError as e:
        raise SpecError(f"malformed spec file {path}: {e.error_count()} error(s)\n{e}")


def malformed_diagnostics(error: ValidationError) -> List[Diagnostic]:
    return [
        Diagnostic(
            code="Malformed",
            location=".".join(str(part) for part in err["loc"]) or "<root>",
            message=err["msg"],
        )
        for err in error.errors()
    ]


# --------------------------
# Type checking (no matrices)
# --------------------------

def _space_of(spec: ScenarioSpec) -> SpaceDescriptor:
    return SpaceDescriptor(tuple((s.label, s.dim) for s in spec.subsystems))


def _check_labels(labels: Sequence[str], declared: Sequence[str], location: str) -> List[Diagnostic]:
    out = []
    for label in labels:
        if label not in declared:
            out.append(Diagnostic(code="UnknownLabel", location=location,
                                  message=f"label {label!r} is not a declared subsystem"))
    if len(set(labels)) != len(labels):
        out.append(Diagnostic(code="DuplicateLabel", location=location,
                              message=f"labels {list(labels)} repeat a subsystem"))
    return out


def _check_state(expr: StateExprT, space: SpaceDescriptor, location: str) -> List[Diagnostic]:
    out = _check_labels(list(expr.labels), space.labels, location)
    if out:
        return out
    dims = [space.dim_of(label) for label in expr.labels]

    if isinstance(expr, BasisKetExpr):
        if len(expr.index) != len(expr.labels):
            out.append(Diagnostic(code="DimensionMismatch", location=location,
                                  message=f"{len(expr.index)} indices for {len(expr.labels)} labels"))
        else:
            for label, i, dim in zip(expr.labels, expr.index, dims):
                if not 0 <= i < dim:
                    out.append(Diagnostic(code="DimensionMismatch", location=location,
                                          message=f"index {i} out of range for {label!r} (dim {dim})"))
    elif isinstance(expr, MaxEntangledExpr):
        if dims[0] != dims[1]:
            out.append(Diagnostic(code="DimensionMismatch", location=location,
                                  message=f"max_entangled needs equal dims, got {dims}"))
    elif isinstance(expr, AmplitudesExpr):
        expected = int(np.prod(dims))
        if len(expr.amplitudes) != expected:
            out.append(Diagnostic(code="DimensionMismatch", location=location,
                                  message=f"{len(expr.amplitudes)} amplitudes for dimension {expected}"))
        else:
            norm = sum(re * re + im * im for re, im in expr.amplitudes)
            if abs(norm - 1.0) > NORM_TOL:
                out.append(Diagnostic(code="NotNormalized", location=location,
                                      message=f"amplitudes have norm^2 {norm:.15g}, expected 1"))
    return out


def _check_density(density: DensitySpec, space: SpaceDescriptor, location: str) -> List[Diagnostic]:
    out: List[Diagnostic] = []
    covered: List[str] = []
    for k, factor in enumerate(density.factors):
        if isinstance(factor, IdentityFactor):
            continue
        factor_location = f"{location}.factors[{k}]"
        out.extend(_check_state(factor, space, factor_location))
        overlap = [label for label in factor.labels if label in covered]
        if overlap:
            out.append(Diagnostic(code="DimensionMismatch", location=factor_location,
                                  message=f"factor overlaps an earlier factor on {overlap}"))
        covered.extend(factor.labels)
    return out


def _check_projector(expr, space: SpaceDescriptor, location: str) -> List[Diagnostic]:
    if isinstance(expr, StateProjectorExpr):
        return _check_state(expr.state, space, f"{location}.state")
    if isinstance(expr, ComplementProjectorExpr):
        return _check_projector(expr.of, space, f"{location}.of")
    return []


def type_check(spec: ScenarioSpec) -> Tuple[Optional[SpaceDescriptor], List[Diagnostic]]:
    try:
        space = _space_of(spec)
    except AnalysisError as e:
        return None, [Diagnostic(code=e.code, location="subsystems", message=e.detail)]

    out: List[Diagnostic] = []
    out.extend(_check_density(spec.rho_i, space, "rho_i"))
    out.extend(_check_density(spec.rho_f, space, "rho_f"))
    if not spec.slots:
        out.append(Diagnostic(code="SpecError", location="slots", message="at least one slot is required"))
    for i, slot in enumerate(spec.slots):
        if not slot:
            out.append(Diagnostic(code="SpecError", location=f"slots[{i}]", message="slot is empty"))
        for j, expr in enumerate(slot):
            out.extend(_check_projector(expr, space, f"slots[{i}][{j}]"))

    if spec.chain_labels is not None:
        n_chains = int(np.prod([len(slot) for slot in spec.slots])) if spec.slots else 0
        if len(spec.chain_labels) != n_chains:
            out.append(Diagnostic(code="SpecError", location="chain_labels",
                                  message=f"{len(spec.chain_labels)} labels for {n_chains} chains"))
        elif len(set(spec.chain_labels)) != len(spec.chain_labels):
            out.append(Diagnostic(code="SpecError", location="chain_labels",
                                  message="chain labels are not unique"))

    if not out:
        trace = _density_trace(spec.rho_i, space)
        if abs(trace - 1.0) > 1e-10:
            out.append(Diagnostic(code="NotNormalized", location="rho_i",
                                  message=f"tr[rho_i] = {trace:.15g}, expected 1"))
    return space, out


def _density_trace(density: DensitySpec, space: SpaceDescriptor) -> float:
    # pure factors have unit trace; uncovered subsystems contribute their dimension
    covered = {label for f in density.factors if not isinstance(f, IdentityFactor) for label in f.labels}
    rest = [dim for label, dim in space.subsystems if label not in covered]
    return density.scale * float(np.prod(rest)) if rest else density.scale


# --------------------------
# Compilation
# --------------------------

def _state(expr: StateExprT, space: SpaceDescriptor) -> StateVector:
    labels = list(expr.labels)
    sub = SpaceDescriptor(tuple((label, space.dim_of(label)) for label in labels))
    if isinstance(expr, BasisKetExpr):
        return basis_ket(sub, expr.index)
    if isinstance(expr, MaxEntangledExpr):
        return max_entangled(sub.dims[0], (labels[0], labels[1]))
    return state_from_amplitudes(sub, [complex(re, im) for re, im in expr.amplitudes])


def _density(density: DensitySpec, space: SpaceDescriptor) -> ComplexMatrix:
    factors = [f for f in density.factors if not isinstance(f, IdentityFactor)]
    if not factors:
        return density.scale * identity(space.total_dim)

    # one embed of the Kronecker product of all factors, in factor-label order
    ops = [density_from_vector(_state(f, space)) for f in factors]
    targets = [label for f in factors for label in f.labels]
    return density.scale * embed(tensor_all(*ops), targets, space)


def _projector(expr, space: SpaceDescriptor) -> Projector:
    if isinstance(expr, IdentityProjectorExpr):
        return identity_projector(space, expr.label or "I")
    if isinstance(expr, ComplementProjectorExpr):
        inner = _projector(expr.of, space)
        return complement(inner, expr.label)
    state = _state(expr.state, space)
    labels = list(expr.state.labels)
    label = expr.label or f"P[{','.join(labels)}]"
    return embed_projector(projector_from_vector(state, label), labels, space, label)


def collect_diagnostics(spec: ScenarioSpec) -> List[Diagnostic]:
    space, out = type_check(spec)
    if out:
        return out

    for i, slot in enumerate(spec.slots):
        projectors = [_projector(expr, space) for expr in slot]
        try:
            check_slot(i, projectors, space)
        except (SlotNotExhaustiveError, SlotNotExclusiveError) as e:
            out.append(Diagnostic(code=e.code, location=f"slots[{i}]", message=e.detail))
    return out


def build_scenario(spec: ScenarioSpec) -> Scenario:
    space, problems = type_check(spec)
    if problems:
        first = problems[0]
        error_cls = _ERRORS_BY_CODE.get(first.code, SpecError)
        raise error_cls(f"{first.location}: {first.message}")

    slots = [[_projector(expr, space) for expr in slot] for slot in spec.slots]
    family = build_family(space, slots, labels=spec.chain_labels)
    logger.info("compiled spec %r: dim %d, %d chains", spec.name, space.total_dim, len(family.chains))
    return Scenario(
        name=spec.name,
        space=space,
        rho_i=_density(spec.rho_i, space),
        rho_f=_density(spec.rho_f, space),
        family=family,
        params={"variant": "spec"},
    )
