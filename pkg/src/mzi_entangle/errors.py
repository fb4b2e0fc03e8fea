class InvalidInputError(ValueError):
    """Raised when a state, operator or parameter violates its contract."""


class UndefinedConditionalError(ValueError):
    """Raised when a conditional state is requested for a zero-probability outcome."""


class UnsupportedSubspaceError(ValueError):
    """Raised when a two-atom state has population outside the {m+, m-} qubit subspace."""
