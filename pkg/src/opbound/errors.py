"""Exception hierarchy shared by every opbound module."""


class OpboundError(Exception):
    """Base class for all library errors."""


class DomainError(OpboundError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ContractError(OpboundError, ValueError):
    """An input object violates the invariants its type promises."""


class ConsistencyError(OpboundError, ArithmeticError):
    """Two independent computations of the same quantity disagree."""


class RangeError(OpboundError, OverflowError):
    """A result is not representable as a finite double."""


class SpecError(OpboundError, ValueError):
    """A JSON function or profile file is malformed."""


class ValidityError(OpboundError, AssertionError):
    """A proven inequality was found violated on concrete numbers."""
