"""Exception types shared across the solver."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation
    (singular kernel evaluated at zero separation, invalid parameter range)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or produced non-finite values."""


class StiffnessError(NumericalError):
    """Time integration stalled (step-size underflow or solver failure).

    Carries the last accepted state so a run can be inspected post mortem.
    """

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class ValidationError(ValueError):
    """One or more configuration problems, collected before any compute.

    `problems` lists every failure, not just the first.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))
