"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    pass


class DegenerateFrame(ValueError):
    """Frame whose Gram determinant is too small to define a subspace."""


class NumericError(RuntimeError):
    """A root finder or solver could not satisfy its preconditions."""
