"""Exception hierarchy shared across the package."""

from __future__ import annotations


class MolbenchError(Exception):
    """Base class for all package errors."""


class ParseError(MolbenchError):
    """Malformed SMILES input. Carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (offset {offset})")
        self.reason = message
        self.offset = offset


class KekulizationError(MolbenchError):
    """No consistent single/double assignment exists for an aromatic system."""


class ValenceError(MolbenchError):
    """One or more atoms exceed their allowed valence."""

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(
            f"atom {i}: valence {v} not allowed for {el}{'%+d' % q if q else ''}"
            for i, el, q, v in self.violations
        )
        super().__init__(f"valence violation: {detail}")


class InvalidMolecule(MolbenchError):
    """Wraps any parse/valence/kekulization failure behind one type."""

    def __init__(self, reason: str, cause: Exception | None = None):
        super().__init__(reason)
        self.reason = reason
        self.cause = cause


class SmartsError(MolbenchError):
    """Unsupported or malformed SMARTS pattern."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class WidthMismatch(MolbenchError):
    """Fingerprints of different width/radius cannot be compared."""


class MissingTable(MolbenchError):
    """A required parameter table was not loaded."""


class EmptyValidSet(MolbenchError):
    """A metric over valid molecules was requested on an empty valid set."""


class AdapterUnsupported(MolbenchError):
    """The generator does not implement the requested capability."""


class AdapterProtocolError(MolbenchError):
    """The generator subprocess violated the wire protocol."""


class AdapterTimeout(MolbenchError):
    """The generator did not answer within the configured timeout."""


class SplitError(MolbenchError):
    """Train/test split indices overlap or fall out of range."""


class EmptyTrainingSet(MolbenchError):
    """A builtin generator needs a non-empty training set."""
