from __future__ import annotations

from typing import Any, Dict, Optional


class ObstructError(Exception):
    """Base error; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context: Dict[str, Any] = context

    def as_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "detail": self.detail, **self.context}


class ParseError(ObstructError):
    exit_code = 2

    def __init__(self, detail: str, *, text: str, position: int, expected: str):
        super().__init__(detail, position=position, expected=expected)
        self.text = text
        self.position = position
        self.expected = expected

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.position}^ expected {self.expected}"


class DomainError(ObstructError):
    pass


class SingularMatrix(ObstructError):
    pass


class UnsupportedBase(ObstructError):
    pass


class TwoTorsionPresent(ObstructError):
    pass


class NotRationalHomologySphere(ObstructError):
    pass


class NonZeroLinkingMatrix(ObstructError):
    pass


class MissingLinkData(ObstructError):
    pass


class MatrixNotDivisibleByP(ObstructError):
    pass


class EvenPrime(ObstructError):
    pass


class IndexOutOfRange(ObstructError):
    pass


class CutoffExceeded(ObstructError):
    pass


class InapplicableRequest(ObstructError):
    pass


class UnknownCatalogName(ObstructError):
    exit_code = 4


class BadParameter(ObstructError):
    exit_code = 4


class UnknownExample(ObstructError):
    exit_code = 4


def exit_code_for(exc: BaseException, default: Optional[int] = None) -> int:
    if isinstance(exc, ObstructError):
        return exc.exit_code
    return default if default is not None else 1
