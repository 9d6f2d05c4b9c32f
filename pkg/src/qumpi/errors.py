"""Exception types shared across the package."""


class ConfigSyntaxError(ValueError):
    """Config text is not valid JSON; carries line/column of the failure."""

    def __init__(self, message, line, column):
        super().__init__(f"config syntax error at line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ConfigFieldError(ValueError):
    """A config field is unknown or semantically invalid."""

    def __init__(self, field, message):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


class ZeroDenominatorError(ValueError):
    """Correlation function requested for a state with ~zero photon number."""


class TruncationError(RuntimeError):
    """Fock-space truncation tail exceeded the budget; advise a larger cutoff."""

    def __init__(self, tail, budget, cutoff):
        super().__init__(
            f"truncation tail {tail:.3e} exceeds budget {budget:.3e} "
            f"at cutoff {cutoff}; increase the cutoff"
        )
        self.tail = tail
        self.budget = budget
        self.cutoff = cutoff


class NoCrossingError(RuntimeError):
    """The scanned range contains no classical-limit crossing."""
