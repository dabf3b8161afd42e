"""Exception hierarchy shared by every pricer."""


class VarSwapError(Exception):
    """Base class for all library errors."""


class ValidationError(VarSwapError):
    """Model parameters or swap specification violate their invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericalError(VarSwapError):
    """A closed form or numerical routine cannot be evaluated reliably."""


class DegenerateParameter(NumericalError):
    pass


class OrderViolation(VarSwapError, ValueError):
    """Cross moments requested with the later time first."""


class ValidityDomain(NumericalError):
    pass


class NonRealMgf(NumericalError):
    pass


class RootNotBracketed(NumericalError):
    pass


class IndeterminateRho0(NumericalError):
    """The slope of the leading gap coefficient in rho vanishes."""


class NoConvergence(NumericalError):
    pass


class KernelFailure(NumericalError):
    pass


class StructureViolation(NumericalError):
    """The quadratic-in-r identity of the discrete strike does not hold."""


class BudgetExceeded(VarSwapError):
    pass
