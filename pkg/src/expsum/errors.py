"""Exception types shared across the package."""


class NotInvertible(ValueError):
    """Raised when a modular inverse is requested for a non-unit."""


class NonCoprimeModuli(ValueError):
    """Raised when CRT combination is attempted with non-coprime moduli."""


class TooManyDivisors(ValueError):
    """Raised when a divisor enumeration would exceed the safety cap."""


class PreconditionViolation(ValueError):
    """Raised when an operation's arguments violate a stated precondition."""


class InvalidBump(ValueError):
    """Raised when a requested bump function fails its construction checks."""


class DegenerateFit(ValueError):
    """Raised when an exponent fit has fewer than three usable points."""


class IdentityError(ArithmeticError):
    """Raised when a self-checked closed-form identity fails its tolerance."""
