from typing import Optional, Tuple


class AnalysisError(Exception):
    """Base error. ``exit_code`` is what the CLI returns when it escapes."""

    exit_code = 1
    code = "AnalysisError"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# --------------------------
# Scenario-file / usage errors (exit 2)
# --------------------------

class SpecError(AnalysisError):
    exit_code = 2
    code = "SpecError"


class UnknownLabelError(SpecError):
    code = "UnknownLabel"


class DuplicateLabelError(SpecError):
    code = "DuplicateLabel"


class DimensionMismatchError(SpecError):
    code = "DimensionMismatch"


class NonSquareError(SpecError):
    code = "NonSquare"


class NotNormalizedError(SpecError):
    code = "NotNormalized"


class NonFiniteError(SpecError):
    code = "NonFinite"


class DegenerateDimensionError(SpecError):
    code = "DegenerateDimension"


class SlotNotExhaustiveError(SpecError):
    code = "SlotNotExhaustive"

    def __init__(self, slot_index: int, deviation: float):
        super().__init__(
            f"slot {slot_index} is not exhaustive: max |sum(P) - I| = {deviation:.3e}"
        )
        self.slot_index = slot_index
        self.deviation = deviation


class SlotNotExclusiveError(SpecError):
    code = "SlotNotExclusive"

    def __init__(self, slot_index: int, pair: Tuple[int, int], deviation: float):
        super().__init__(
            f"slot {slot_index} is not exclusive: projectors {pair[0]} and {pair[1]} "
            f"overlap, max |P_j P_k| = {deviation:.3e}"
        )
        self.slot_index = slot_index
        self.pair = pair
        self.deviation = deviation


# --------------------------
# Analysis errors (exit 1)
# --------------------------

class ZeroNormalizationError(AnalysisError):
    code = "ZeroNormalization"


class ZeroDenominatorError(AnalysisError):
    code = "ZeroDenominator"


class NegativeWeightError(AnalysisError):
    code = "NegativeWeight"


class NotConsistentError(AnalysisError):
    """CH refuses to assign probabilities. The CLI reports this as a verdict."""

    exit_code = 0
    code = "NotConsistent"

    def __init__(self, verdict, detail: Optional[str] = None):
        super().__init__(
            detail
            or f"decoherence functional is not diagonal: max off-diagonal "
               f"{verdict.max_violation:.3e} at {verdict.worst_pair}"
        )
        self.verdict = verdict
