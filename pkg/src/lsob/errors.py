"""Exception hierarchy shared by every lsob module."""


class LsobError(Exception):
    """Base class for library errors."""


class ModeMismatch(LsobError, TypeError):
    """Operands live in different scalar fields (rational vs float, or precisions)."""


class InexactDivision(LsobError, ArithmeticError):
    """A polynomial division that should be exact left a remainder."""

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class GammaUnavailable(LsobError):
    """Gamma(alpha + 1) is not representable in the requested scalar field."""


class PositiveDefiniteViolation(LsobError):
    """The kernel matrix failed its positive-definiteness invariant."""


class SingularSystem(LsobError, ArithmeticError):
    """A linear system expected to be nonsingular turned out singular."""


class IdentityViolation(LsobError, AssertionError):
    """A polynomial identity that must hold identically has a nonzero residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonPolynomialResult(LsobError):
    """A ladder operator applied to the wrong input produced a true rational function."""


class NoConvergence(LsobError):
    """Simultaneous root iteration hit its sweep cap.

    ``partial`` carries the best :class:`~lsob.roots.ZeroSet` found so far.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NonSimplePole(LsobError):
    """A pole of the external field is not simple."""


class PoleCollision(LsobError, ValueError):
    """A charge sits on a pole of the external field or on another charge."""


class ConfigError(LsobError, ValueError):
    """Configuration document failed validation."""
