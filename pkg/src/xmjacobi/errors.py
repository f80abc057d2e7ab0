"""Exception hierarchy shared by all modules."""


class XmJacobiError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(XmJacobiError, ValueError):
    """Invalid model or function parameters."""


class DomainError(XmJacobiError, ValueError):
    """Argument outside the domain of a function (e.g. r <= 0)."""


class PoleError(XmJacobiError, ArithmeticError):
    """A gamma-function argument sits on a pole."""


class InfinityError(PoleError):
    """A ratio of gamma functions has an unmatched pole in the numerator."""


class ConvergenceError(XmJacobiError, ArithmeticError):
    """A series did not converge within ``max_terms``."""


class DegenerateError(XmJacobiError, ArithmeticError):
    """The hypergeometric connection formula is singular (a - b integer)."""


class CoefficientSingularityError(XmJacobiError, ArithmeticError):
    """A rational coefficient of a polynomial construction has a vanishing denominator."""

    def __init__(self, factor_name, value):
        self.factor_name = factor_name
        self.value = value
        super().__init__(f"coefficient denominator {factor_name} = {value!r} vanishes")


class DenominatorZeroError(XmJacobiError, ArithmeticError):
    """The denominator polynomial xi_m vanishes at the evaluation point."""


class BracketZeroError(XmJacobiError, ArithmeticError):
    """The m-dependent S-matrix factor has a vanishing denominator."""


class NonUnitaryError(XmJacobiError, ValueError):
    """An S-matrix value is not unimodular within tolerance."""


class NoBracketError(XmJacobiError, RuntimeError):
    """No sign change of the matching function inside an energy sub-interval."""

    def __init__(self, lo, hi, message="no sign change"):
        self.lo = lo
        self.hi = hi
        super().__init__(f"{message} in [{lo!r}, {hi!r}]")


class IllConditionedError(XmJacobiError, ArithmeticError):
    """Two-point phase matching is ill conditioned; move the matching points."""


class PlateauError(XmJacobiError, ArithmeticError):
    """The matching region is not inside the asymptotic plateau of the potential."""


class GridError(XmJacobiError, ValueError):
    """Radial grid violates its invariants or is too coarse near the origin."""


class QuadratureWarning(UserWarning):
    """Panel refinement changed a quadrature result by more than the tolerance."""
