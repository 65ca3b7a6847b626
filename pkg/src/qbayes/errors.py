"""Exception types shared by all layers of the library."""


class DimensionError(ValueError):
    """Shapes, spaces, or dimension lists do not line up."""


class NotPositiveError(ValueError):
    """A matrix that must be positive semidefinite is not."""


class ZeroValidityError(ValueError):
    """Conditioning on evidence whose validity is numerically zero."""


class SingularMarginalError(ValueError):
    """An inverse square root was requested of a (near-)singular marginal."""


class SupportError(ValueError):
    """A classical marginal lacks full support; the message names the label."""
