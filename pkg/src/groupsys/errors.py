"""Exception types shared across the package."""


class GroupSysError(ValueError):
    """Base class for every error raised by groupsys."""


class FormatError(GroupSysError):
    """A text file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.path = path


# algebra
class NotAssociative(GroupSysError):
    pass


class NoIdentityAtZero(GroupSysError):
    pass


class MissingInverse(GroupSysError):
    pass


class ParentMismatch(GroupSysError):
    pass


class NotSubgroup(GroupSysError):
    pass


class NotNormal(GroupSysError):
    pass


class NotNested(GroupSysError):
    pass


class InvalidChain(GroupSysError):
    pass


# system
class NotClosed(GroupSysError):
    pass


class AlphabetMismatch(GroupSysError):
    pass


class DuplicateCodeword(GroupSysError):
    pass


class OutOfWindow(GroupSysError):
    pass


# chains
class NotControllableInWindow(GroupSysError):
    pass


# generators / encoder
class TransversalDeficit(GroupSysError):
    pass


class ForeignRepresentative(GroupSysError):
    pass


class ShiftViolation(GroupSysError):
    pass


class IllDefinedOperation(GroupSysError):
    pass


# signature
class NotTimeInvariant(GroupSysError):
    pass


class OverlapConflict(GroupSysError):
    pass


# synthesis
class NoCompletion(GroupSysError):
    pass


class BudgetExceeded(GroupSysError):
    pass


class RealizationMismatch(GroupSysError):
    pass
