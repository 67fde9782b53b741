class AlgebraError(Exception):
    """Base class for every error raised by the operator calculus."""


class DepthExceeded(AlgebraError):
    """A relation or flow value was needed beyond the depth that was built."""


class InsufficientPrecision(AlgebraError):
    """A coefficient was requested below the precision floor of an operator."""


class OrientationMismatch(AlgebraError):
    """Two operators expanded in different main derivations were combined."""


class NegativeExponent(AlgebraError):
    """A differential operator was required but a negative power was found."""


class NotSelfAdjoint(AlgebraError):
    """A symmetric-form extraction met a coefficient that must vanish."""
