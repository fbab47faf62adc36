"""Exception hierarchy shared by all permid modules."""


class PermidError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PermidError):
    """An input object or parameter is malformed."""


class HypothesisError(PermidError):
    """A mathematical precondition of a construction or bound is not met."""


class BoundViolationError(PermidError):
    """A proven inequality failed on computed data.

    This never indicates bad input: the checked statements are theorems, so a
    violation means the implementation itself is wrong.
    """


class BudgetError(PermidError):
    """A memory or attempt budget would be exceeded."""
