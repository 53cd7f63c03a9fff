"""Exception hierarchy; each class maps to one CLI exit code."""


class FredholmLabError(Exception):
    exit_code = 1


class InputError(FredholmLabError, ValueError):
    """Malformed or out-of-contract input."""

    exit_code = 2


class NumericalRefusal(FredholmLabError):
    """A computation declined to answer because its numerical preconditions failed."""

    exit_code = 4


class VanishingSymbolError(NumericalRefusal):
    pass


class HypothesisViolation(NumericalRefusal):
    """A theorem hypothesis (F^2 = Id, grading relations, idempotence) does not hold."""


class StepBudgetExceeded(NumericalRefusal):
    def __init__(self, word, steps):
        super().__init__(f"handle reduction exceeded {steps} steps on word {word!r}")
        self.word = word
        self.steps = steps


class RouteDisagreement(NumericalRefusal):
    pass


NON_STABILIZING_EXIT = 3
