"""Exception types raised across the package."""


class MadCantorError(Exception):
    pass


class NonPositiveInput(MadCantorError, ValueError):
    pass


class DegenerateProduct(MadCantorError, ArithmeticError):
    """A prefix product of the t-sequence vanished, so the recurrence is undefined."""


class InvalidC(MadCantorError, ValueError):
    pass


class ConfigError(MadCantorError, ValueError):
    pass


class Exhausted(MadCantorError):
    """Every branch of the construction died before the requested depth."""

    def __init__(self, message, generation=None):
        super().__init__(message)
        self.generation = generation


class BudgetExceeded(MadCantorError):
    def __init__(self, generation, observed, budget):
        super().__init__(
            f"generation {generation}: observed {observed} removals exceeds budget {budget}"
        )
        self.generation = generation
        self.observed = observed
        self.budget = budget


class DivergentTerm(MadCantorError, ZeroDivisionError):
    def __init__(self, q, row):
        super().__init__(f"||L_{row} q|| = 0 at q = {tuple(q)}")
        self.q = tuple(q)
        self.row = row


class PreconditionViolated(MadCantorError, ValueError):
    pass


class SameCore(MadCantorError, ValueError):
    pass


class FormatError(MadCantorError, ValueError):
    pass


class CertificationFailed(MadCantorError):
    """The witness did not re-certify above c; indicates an internal inconsistency."""
