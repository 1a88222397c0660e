"""Shared errors and report records for the q-series verifier."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Protocol


class QSeriesError(Exception):
    """Base class for every domain error raised by the engine."""


class ZeroLeadingTerm(QSeriesError):
    """Raised when inverting a series that is zero to its certified order."""


class InsufficientPrecision(QSeriesError):
    """Raised when a comparison or evaluation needs coefficients beyond the certified order."""


class ZeroFactor(QSeriesError):
    """Raised when an infinite product contains the factor 1 - q^0."""


class NonTerminating(QSeriesError):
    """Raised when a truncated sum or product cannot terminate within the row cap."""


class PoleAtTerm(QSeriesError):
    """Raised when an Appell-Lerch term has the denominator 1 - q^0."""

    def __init__(self, r: int, message: Optional[str] = None):
        self.r = r
        super().__init__(message or f"Appell-Lerch term r={r} has a pole (1 - q^0)")


class NonThetaPower(QSeriesError):
    """Raised when a parameter power does not reduce to +-q^k."""


class DivisionByZeroTheta(QSeriesError):
    """Raised when a theta quotient divides by an identically zero theta function."""


class NonGenericRho(QSeriesError):
    """Raised when a Bailey-lemma specialization produces a zero denominator."""


class NonConvergent(QSeriesError):
    """Raised when an ordinary sum does not converge within the row cap."""


class PreconditionFailed(QSeriesError):
    """Raised when a pair constructor is applied outside its hypotheses."""


class UnknownPairId(QSeriesError, KeyError):
    """Raised for an id missing from the Bailey pair catalog."""

    def __str__(self) -> str:
        return self.args[0] if self.args else "unknown pair id"


class UnknownIdentityId(QSeriesError, KeyError):
    """Raised for an id missing from the identity catalog."""

    def __str__(self) -> str:
        return self.args[0] if self.args else "unknown identity id"


class StabilizationFailure(QSeriesError):
    """Raised when even or odd partial sums of a starred sum fail to settle."""


class InvalidSpec(QSeriesError, ValueError):
    """Raised when a specification object violates its invariants."""


def format_rational(value: Fraction) -> str:
    """Render a rational as the report form "num/den"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse the report form "num/den" (a bare integer is accepted too)."""
    return Fraction(text)


STATUS_EQUAL = "equal"
STATUS_MISMATCH = "mismatch"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class MismatchDetail:
    """First differing coefficient of a failed comparison."""
    exponent: int
    left: Fraction
    right: Fraction
    index: Optional[int] = None

    def to_dict(self) -> dict:
        data = {
            "exponent": self.exponent,
            "left": format_rational(self.left),
            "right": format_rational(self.right),
        }
        if self.index is not None:
            data["index"] = self.index
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'MismatchDetail':
        return cls(
            exponent=data["exponent"],
            left=parse_rational(data["left"]),
            right=parse_rational(data["right"]),
            index=data.get("index"),
        )


@dataclass(frozen=True)
class VerificationRecord:
    """Outcome of one comparison inside a verification run."""
    id: str
    label: str
    status: str
    order: int
    first_mismatch: Optional[MismatchDetail] = None
    elapsed_ms: float = 0.0
    detail: str = ""

    @property
    def sort_key(self) -> tuple:
        return (self.id, self.label)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "status": self.status,
            "order": self.order,
            "first_mismatch": self.first_mismatch.to_dict() if self.first_mismatch else None,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'VerificationRecord':
        mismatch = data.get("first_mismatch")
        return cls(
            id=data["id"],
            label=data["label"],
            status=data["status"],
            order=data["order"],
            first_mismatch=MismatchDetail.from_dict(mismatch) if mismatch else None,
            elapsed_ms=data.get("elapsed_ms", 0.0),
            detail=data.get("detail", ""),
        )


@dataclass
class VerificationReport:
    """Collection of records for one CLI command, with derived counts."""
    command: str
    records: List[VerificationRecord] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {STATUS_EQUAL: 0, STATUS_MISMATCH: 0, STATUS_ERROR: 0}
        for record in self.records:
            counts[record.status] = counts.get(record.status, 0) + 1
        counts["total"] = len(self.records)
        return counts

    @property
    def all_equal(self) -> bool:
        return all(record.status == STATUS_EQUAL for record in self.records)

    def sorted(self) -> 'VerificationReport':
        return VerificationReport(self.command, sorted(self.records, key=lambda r: r.sort_key))

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "records": [record.to_dict() for record in self.records],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> 'VerificationReport':
        return cls(
            command=data["command"],
            records=[VerificationRecord.from_dict(item) for item in data.get("records", [])],
        )

    @classmethod
    def from_json(cls, text: str) -> 'VerificationReport':
        return cls.from_dict(json.loads(text))


class ReportSink(Protocol):
    """Protocol for anything that consumes records as a run progresses."""
    def on_record(self, record: VerificationRecord) -> None: ...
    def on_finished(self, report: VerificationReport) -> None: ...
