from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional

from .errors import EplError

TINY = 1e-300


def relative_residual(lhs: Any, rhs: Any) -> float:
    scale = max(abs(lhs), abs(rhs), TINY)
    return float(abs(lhs - rhs) / scale)


def term_normalized(terms: Iterable[Any]) -> float:
    """|sum of terms| / max |term|."""
    terms = list(terms)
    scale = max([abs(t) for t in terms] + [TINY])
    return float(abs(sum(terms)) / scale)


def relative_spread(values: Iterable[Any]) -> float:
    """max |v - v_0| / |v_0| over a sequence of values that should agree."""
    values = list(values)
    if not values:
        return 0.0
    ref = values[0]
    scale = max(abs(ref), TINY)
    return float(max(abs(v - ref) for v in values) / scale)


@dataclass(slots=True)
class CheckRecord:
    name: str
    residual: Optional[float]
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass(slots=True)
class SuiteReport:
    suite: str
    records: List[CheckRecord] = field(default_factory=list)

    def record(self, name: str, residual: Any, tolerance: float, detail: str = "") -> CheckRecord:
        value = float(residual)
        rec = CheckRecord(name=name, residual=value, tolerance=tolerance,
                          passed=value <= tolerance, detail=detail)
        self.records.append(rec)
        return rec

    def run(self, name: str, tolerance: float, check: Callable[[], Any], detail: str = "") -> CheckRecord:
        """Evaluate a residual; a raised EplError becomes a failed record."""
        try:
            residual = check()
        except EplError as exc:
            rec = CheckRecord(name=name, residual=None, tolerance=tolerance, passed=False,
                              detail=f"{type(exc).__name__}: {exc}")
            self.records.append(rec)
            return rec
        return self.record(name, residual, tolerance, detail)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [r.to_dict() for r in self.records],
        }
