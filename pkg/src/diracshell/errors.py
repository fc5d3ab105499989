"""Exception hierarchy shared by all solver modules."""


class DiracShellError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrix(DiracShellError):
    """A 2x2 matrix inversion was requested but the determinant is (numerically) zero."""


class ConfiningRegime(DiracShellError):
    """The interaction decouples the two half-lines (d = -4, omega = 0); no transmission matrix exists."""


class InvalidRegime(DiracShellError):
    """The requested coupling transformation is undefined for this parameter combination."""


class UnsupportedRegime(DiracShellError):
    """The operation is only available for discriminants d > -4."""


class DomainError(DiracShellError):
    """An argument lies outside the admissible domain of the operation."""


class SpectralPoint(DiracShellError):
    """The spectral parameter z lies in the spectrum, so the resolvent does not exist."""


class DegenerateContext(DiracShellError):
    """The combination m = k = 0 has no spectral gap and is rejected."""


class NoBoundState(DiracShellError):
    """A sweep was requested at a momentum where the limiting model has no bound state."""


class NotLinear(DiracShellError):
    """Group velocity is only defined for linear bands."""
