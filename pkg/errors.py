from typing import Optional


class KanTowerError(Exception):
    """Base class for every error the library raises on purpose."""

    exit_code = 2


class InvalidArgument(KanTowerError, ValueError):
    """Parameters out of range, mismatched ranks or classes."""


class SpaceFormatError(KanTowerError):
    """A space file could not be ingested.

    ``code`` is 1 for malformed JSON, 2 for a schema violation and 3 for a
    simplicial-identity violation. ``rule`` names what was violated and
    ``line``/``column`` point into the file when a position is known.
    """

    MALFORMED = 1
    SCHEMA = 2
    IDENTITY = 3

    def __init__(
        self,
        code: int,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        rule: Optional[str] = None,
    ):
        self.code = code
        self.line = line
        self.column = column
        self.rule = rule
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "message": str(self),
            "line": self.line,
            "column": self.column,
            "rule": self.rule,
        }


class PresentationFormatError(KanTowerError):
    pass


class UnsupportedTorsion(KanTowerError):
    """Moore homology was asked for a degree range containing torsion."""


class ResourceCapExceeded(KanTowerError):
    exit_code = 3


class InternalInvariantError(KanTowerError):
    """An invariant the code guarantees did not hold. Always a bug."""

    exit_code = 4
