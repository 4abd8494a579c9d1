"""Typed error variants.

Every error carries a stable string ``code`` so the CLI can serialize it
without guessing from the message.
"""

from __future__ import annotations

from typing import Any


class A2WCError(Exception):
    code = "error"

    def __init__(self, message: str, position: int | None = None, **detail: Any) -> None:
        super().__init__(message)
        self.detail = detail
        self.position = position

    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {"code": self.code, "message": str(self)}
        if self.position is not None:
            rec["position"] = self.position
        for key, value in sorted(self.detail.items()):
            rec[key] = value
        return rec


class ParseError(A2WCError):
    code = "parse_error"


class ParameterError(A2WCError):
    """Parameter vector outside the required stratum."""

    code = "parameter_error"


class RootLatticeError(A2WCError):
    code = "not_in_root_lattice"


class SingularSystem(A2WCError):
    code = "singular_system"


class IndeterminatePoint(A2WCError):
    code = "indeterminate_point"


class ContractedToBoundary(A2WCError):
    code = "contracted_to_boundary"


class ChartUnavailable(A2WCError):
    code = "chart_unavailable"


class ShapeMismatch(A2WCError):
    code = "shape_mismatch"


class NoGauge(A2WCError):
    code = "no_gauge"


class HypothesisViolated(A2WCError):
    code = "hypothesis_violated"


class CalibrationFailed(A2WCError):
    code = "calibration_failed"


class OnContractedLine(A2WCError):
    code = "on_contracted_line"


class BoundaryImage(A2WCError):
    code = "boundary_image"


ERROR_CODES = sorted(
    cls.code
    for cls in (
        A2WCError, ParseError, ParameterError, RootLatticeError, SingularSystem,
        IndeterminatePoint, ContractedToBoundary, ChartUnavailable, ShapeMismatch,
        NoGauge, HypothesisViolated, CalibrationFailed, OnContractedLine, BoundaryImage,
    )
)
