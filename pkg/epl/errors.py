from __future__ import annotations

from typing import Any, Optional


class EplError(Exception):
    """Base class for every failure raised by the toolkit."""

    exit_code = 3

    def __init__(self, message: str, where: Optional[Any] = None) -> None:
        super().__init__(message)
        self.where = where


class DomainError(EplError, ValueError):
    """Invalid input: zero arguments, poles, violated parameter constraints."""

    exit_code = 2


class NumericalFailure(EplError, ArithmeticError):
    """Truncation caps, singular systems, Newton non-convergence."""

    exit_code = 3

    def __init__(self, message: str, where: Optional[Any] = None, step: Optional[int] = None) -> None:
        super().__init__(message, where)
        self.step = step


class VerificationFailure(EplError):
    exit_code = 1
