"""Exception types shared across the pipelines; the CLI maps them to exit codes."""


class InvalidInput(ValueError):
    """Input violates an operation's precondition (exit code 1)."""


class ConditionFailure(InvalidInput):
    """A (p, D) pair does not pass the requested congruence/splitting gate."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class UndecidedError(RuntimeError):
    """A local solvability question was not settled within the depth cap (exit code 2)."""

    def __init__(self, message, certificate=None, key=None):
        super().__init__(message)
        self.certificate = certificate
        self.key = key


class SearchExhausted(RuntimeError):
    """A witness search ran out of candidates below its bound (exit code 2)."""


class InconsistentResult(RuntimeError):
    """Internal or user-supplied data contradict each other (exit code 2)."""
