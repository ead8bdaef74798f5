"""Exception types shared across the toolkit."""


class ContactLabError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(ContactLabError, ValueError):
    """An input vector's length does not match the model/grid dimension."""


class OverlapError(ContactLabError):
    """Two block interiors interpenetrate beyond the contact tolerance."""


class DegenerateFiring(ContactLabError, ArithmeticError):
    """No rule produces a usable firing strength (non-finite exponents)."""


class SingularSystem(ContactLabError, ArithmeticError):
    """The consequent least-squares solve failed even with regularization."""


class NonFinite(ContactLabError, ArithmeticError):
    """A trained parameter became NaN/Inf (learning rate too high)."""


class EmptyData(ContactLabError, ValueError):
    """An operation that needs at least one sample received none."""


class UnlabeledGrid(ContactLabError):
    """Classification was requested on a SOM grid that was never labeled."""


class WrongVertexCount(ContactLabError, ValueError):
    """Feature extraction needs quadrilateral blocks (exactly 4 vertices)."""


class InsufficientData(ContactLabError, ValueError):
    """The simulated series is too short for the requested dataset split."""


class SizeTooLarge(ContactLabError, ValueError):
    """A scan window does not fit inside the block domain."""
