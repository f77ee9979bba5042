"""Exception types shared across the package."""


class StroboscopicTomographyError(Exception):
    """Base class for every error raised by strobe_tomo."""


class ValidationError(StroboscopicTomographyError, ValueError):
    """An input value, file or configuration violates its contract."""


class NumericalFailure(StroboscopicTomographyError, RuntimeError):
    """A numerical routine failed to meet its accuracy contract.

    Raised for eigensolver non-convergence, evolved states that drift
    outside the density-matrix tolerances, and similar breakdowns that
    indicate the computation cannot be trusted rather than bad input.
    """


class SearchExhausted(StroboscopicTomographyError, RuntimeError):
    """Randomized observable search ran out of attempts.

    Carries ``attempts`` (how many candidate sets were tried) and
    ``best_rank`` (the largest spanning rank any candidate achieved) so
    callers can report how close the search came.
    """

    def __init__(self, message: str, *, attempts: int, best_rank: int):
        super().__init__(message)
        self.attempts = attempts
        self.best_rank = best_rank


class RankDeficiencyError(StroboscopicTomographyError, RuntimeError):
    """The measurement design does not determine the unknown state."""

    def __init__(self, message: str, *, achieved_rank: int, required_rank: int):
        super().__init__(message)
        self.achieved_rank = achieved_rank
        self.required_rank = required_rank
