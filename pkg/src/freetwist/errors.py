"""Exception types shared across the package."""


class FreeTwistError(Exception):
    pass


class TrivialWord(FreeTwistError, ValueError):
    pass


class BudgetExceeded(FreeTwistError):
    """An image word would exceed the letter budget.

    ``estimate`` is the pre-reduction length that tripped the cap and
    ``index`` the iteration reached (if any).
    """

    def __init__(self, estimate, budget, index=None):
        self.estimate = estimate
        self.budget = budget
        self.index = index
        msg = f"image length {estimate} exceeds budget {budget}"
        if index is not None:
            msg += f" at iteration {index}"
        super().__init__(msg)


class RankMismatch(FreeTwistError, ValueError):
    pass


class NotInvertibleData(FreeTwistError, ValueError):
    pass


class NotUnimodular(FreeTwistError, ValueError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"determinant {det} is not +1 or -1")


class RadiusMismatch(FreeTwistError, ValueError):
    pass


class HypothesisUnmet(FreeTwistError, ValueError):
    pass


class EllipticInput(FreeTwistError, ValueError):
    pass


class ScheduleExhausted(FreeTwistError):
    pass


class ConfigError(FreeTwistError, ValueError):
    pass


class FillingHeuristicFailed(UserWarning):
    pass
