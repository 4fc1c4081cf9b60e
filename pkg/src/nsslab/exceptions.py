"""Exception and warning classes raised across nsslab.

Errors are grouped so the command line front end can map them onto exit
codes: :class:`ParseError` and its subclasses are input-format problems,
:class:`NumericError` and its subclasses are numerical/contract failures.
"""


class NumericError(ValueError):
    """Base class for numerical contract violations."""


class EmptyClass(NumericError):
    """A class (or point collection) with no samples."""


class DimensionMismatch(NumericError):
    """Vectors or matrices whose dimensions do not agree."""


class NotSymmetric(NumericError):
    pass


class BadDimension(NumericError):
    """A requested subspace dimension outside its valid range."""


class SingularCovariance(NumericError):
    """Pooled covariance is not positive definite or is ill conditioned.

    Reduce the ambient dimension (e.g. with :class:`nsslab.dataio.PCAReducer`)
    before fitting the discriminant.
    """


class InfeasibleFolds(NumericError):
    """Stratified folds cannot keep every class in every training part."""


class AngleInfeasible(NumericError):
    pass


class WrongMode(NumericError):
    """Density requested from a family that has no closed-form density."""


class UnsupportedFamily(NumericError):
    pass


class ParseError(ValueError):
    """Malformed input file; carries the 1-based line and column if known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class RaggedRows(ParseError):
    pass


class NonAscendingIndex(ParseError):
    pass


class DegenerateClassWarning(UserWarning):
    """A class has no more samples than the requested subspace dimension."""
