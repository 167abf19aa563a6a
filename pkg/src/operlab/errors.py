"""Exception hierarchy shared by every module.

Each exception carries the CLI exit code it maps to, so the command layer can
translate failures without a lookup table.
"""

from __future__ import annotations


class OperlabError(Exception):
    """Base class for all library errors."""

    exit_code = 5


class InputError(OperlabError):
    """Bad user input (malformed files, out-of-range parameters)."""

    exit_code = 4


class NumericFailure(OperlabError):
    """A numerical routine could not deliver a trustworthy answer."""

    exit_code = 5


class InvalidRank(InputError):
    pass


class SingularCartan(NumericFailure):
    pass


class DegenerateKernel(NumericFailure):
    pass


class IndexOutOfRange(InputError):
    pass


class TableMismatch(OperlabError):
    exit_code = 3

    def __init__(self, row: str, expected, got):
        super().__init__(f"row {row}: expected {expected}, computed {got}")
        self.row = row
        self.expected = expected
        self.got = got


class OutsideDomain(InputError):
    pass


class StencilOutOfDomain(InputError):
    pass


class CriticalPoint(NumericFailure):
    pass


class NotImmersed(NumericFailure):
    pass


class NotCyclic(InputError):
    pass


class Sl2Excluded(InputError):
    pass


class NegativeRadicand(NumericFailure):
    pass


class DegenerateMetric(NumericFailure):
    pass


class StepUnderflow(NumericFailure):
    pass


class MismatchedBasepoint(InputError):
    pass


class RayTooShort(InputError):
    pass


class EmptyGrid(InputError):
    pass
