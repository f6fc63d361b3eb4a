"""Exception hierarchy shared by all modules."""


class TraceFormsError(Exception):
    """Base class; the CLI maps these to a nonzero exit code."""

    code = "error"


class InvalidInputError(TraceFormsError, ValueError):
    code = "invalid-input"


class InvalidBodyError(TraceFormsError, ValueError):
    code = "invalid-body"


class StrictConvexityError(InvalidBodyError):
    code = "strictness-violation"


class NonlinearIntegrandError(TraceFormsError, ValueError):
    code = "nonlinear-integrand"


class RuleMismatchError(TraceFormsError, ValueError):
    code = "rule-mismatch"


class GroupTooLargeError(TraceFormsError, RuntimeError):
    code = "group-too-large"


class InvariantViolationError(TraceFormsError, RuntimeError):
    code = "invariant-violation"
