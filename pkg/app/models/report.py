import math
from dataclasses import dataclass, field
from typing import Optional
from ..errors import DomainError
from .occupation import OccupationVector

METHODS = ("simulation", "closed_form", "both")
# slack on the 1/d <= f_single <= 1 range for rounding in simulated marginals
RANGE_TOL = 1e-9


@dataclass(frozen=True)
class FidelityReport:
    d: int
    n_in: int
    m_out: int
    k: int
    f_single: float
    f_global: float
    f_limit: float
    method: str
    f_single_closed: Optional[float] = None
    f_global_closed: Optional[float] = None
    phases: tuple = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        for value in (self.f_single, self.f_global, self.f_limit):
            if not math.isfinite(value):
                raise DomainError("fidelity values must be finite")
        if not 1.0 / self.d - RANGE_TOL <= self.f_single <= 1.0 + RANGE_TOL:
            raise DomainError(f"single-qudit fidelity {self.f_single!r} outside [1/{self.d}, 1]")

    def to_dict(self):
        data = {
            "d": self.d,
            "n_in": self.n_in,
            "m_out": self.m_out,
            "k": self.k,
            "f_single": self.f_single,
            "f_global": self.f_global,
            "f_limit": self.f_limit,
            "method": self.method,
        }
        if self.method == "both":
            data["f_single_closed"] = self.f_single_closed
            data["f_global_closed"] = self.f_global_closed
        if self.phases:
            data["phases"] = list(self.phases)
        return data


@dataclass(frozen=True)
class BlockScore:
    """Per-block scores at weight p = 1 for one output label {m_j}."""

    block: OccupationVector
    f_single_block: float
    f_global_block: float
    f_global_diagonal: float

    def score(self, merit):
        return self.f_single_block if merit == "single" else self.f_global_block

    def to_dict(self):
        return {
            "block": list(self.block.counts),
            "f_single_block": self.f_single_block,
            "f_global_block": self.f_global_block,
            "f_global_diagonal": self.f_global_diagonal,
        }


@dataclass(frozen=True)
class VerificationResult:
    check_name: str
    parameters: dict
    max_deviation: Optional[float]
    tolerance: float
    passed: bool
    status: str = "passed"
    reason: str = ""

    @classmethod
    def measured(cls, check_name, parameters, deviation, tolerance):
        deviation = float(deviation)
        passed = deviation <= tolerance
        return cls(
            check_name=check_name,
            parameters=dict(parameters),
            max_deviation=deviation,
            tolerance=float(tolerance),
            passed=passed,
            status="passed" if passed else "failed",
        )

    @classmethod
    def skipped(cls, check_name, parameters, tolerance, reason):
        return cls(
            check_name=check_name,
            parameters=dict(parameters),
            max_deviation=None,
            tolerance=float(tolerance),
            passed=False,
            status="skipped",
            reason=reason,
        )

    def sort_key(self):
        return (self.check_name, sorted(self.parameters.items()))

    def to_dict(self):
        data = {
            "check_name": self.check_name,
            "parameters": self.parameters,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "status": self.status,
        }
        if self.reason:
            data["reason"] = self.reason
        return data


@dataclass(frozen=True)
class CurveRow:
    d: int
    n_in: int
    m_out: int
    k: int
    f_phase: float
    f_universal: float
    f_limit: float

    def to_dict(self):
        return {
            "d": self.d,
            "n_in": self.n_in,
            "m_out": self.m_out,
            "k": self.k,
            "f_phase": self.f_phase,
            "f_universal": self.f_universal,
            "f_limit": self.f_limit,
        }


@dataclass(frozen=True)
class BlockSearch:
    """Result of an exhaustive block search for one merit."""

    d: int
    n_in: int
    m_out: int
    merit: str
    winners: tuple
    scores: tuple = field(default_factory=tuple)

    @property
    def is_economical_point(self):
        excess = self.m_out - self.n_in
        return excess >= 0 and excess % self.d == 0

    def to_dict(self):
        return {
            "d": self.d,
            "n_in": self.n_in,
            "m_out": self.m_out,
            "merit": self.merit,
            "winners": [list(block.counts) for block in self.winners],
            "scores": [score.to_dict() for score in self.scores],
        }
