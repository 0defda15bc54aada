"""
Exception hierarchy shared by the library modules and the CLI.
"""

from typing import Optional


class SurgeryError(Exception):
    """Base class for every failure raised by the surgery package."""

    exit_code = 1

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def at(self, line: Optional[int], column: Optional[int]) -> "SurgeryError":
        """Attach a plan location unless one is already recorded."""
        if self.line is None:
            self.line = line
            self.column = column
        return self

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


# ═══════════════════════════════════════════════════════════════════════════════
# LIBRARY ERRORS
# ═══════════════════════════════════════════════════════════════════════════════

class LatticeError(SurgeryError):
    """Mismatched lattices, unknown generators, missing canonical class."""


class LabelError(SurgeryError):
    """Invariants outside the odd, simply connected, b1 = 0 case."""


class InvariantError(SurgeryError):
    """Euler characteristic and signature that do not describe a 4-manifold."""


class BalanceError(SurgeryError):
    """A ledger step whose two sides no longer agree."""

    def __init__(self, a_side, b_side, message: Optional[str] = None):
        super().__init__(message or f"balance violated: A side {a_side} != B side {b_side}")
        self.a_side = a_side
        self.b_side = b_side


class LedgerError(SurgeryError):
    """Malformed ledger step or a finalized configuration failing its checks."""


class MoveError(SurgeryError):
    """A twist-word move that does not match the word at its position."""

    def __init__(self, move, position: int, message: str):
        super().__init__(f"{move}: {message}")
        self.move = move
        self.position = position


class HomologyError(SurgeryError):
    """Chain classes violating the intersection pattern of the chain."""


class PlumbingError(SurgeryError):
    """Invalid (p, q) or a chain failing its continued-fraction checks."""


class EmbeddingError(SurgeryError):
    """Vertex classes whose Gram matrix differs from the plumbing matrix."""


class DerivationFormatError(SurgeryError):
    """Malformed derivation file."""

    exit_code = 2


# ═══════════════════════════════════════════════════════════════════════════════
# PLAN ERRORS
# ═══════════════════════════════════════════════════════════════════════════════

class PlanSyntaxError(SurgeryError):
    exit_code = 2


class PlanReferenceError(SurgeryError):
    exit_code = 2

    def __init__(self, symbol: str, line: Optional[int] = None, column: Optional[int] = None,
                 message: Optional[str] = None):
        super().__init__(message or f"undefined symbol '{symbol}'", line, column)
        self.symbol = symbol


class PlanArityError(SurgeryError):
    exit_code = 2


class PlanAssertionError(SurgeryError):
    """An `assert` statement whose expected value differs from the report."""

    def __init__(self, key: str, expected: str, observed: Optional[str],
                 line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(f"assert {key}: expected {expected}, got {observed}", line, column)
        self.key = key
        self.expected = expected
        self.observed = observed
