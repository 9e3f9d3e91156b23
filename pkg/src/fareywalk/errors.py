"""Exception types shared across the package."""


class ResourceCapError(RuntimeError):
    """A request would exceed a configured size cap, such as the sphere radius."""

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what} = {requested} exceeds cap {cap}")


class NotInGroupError(ValueError):
    """Raised when tile descent cannot reduce a matrix to the identity."""


class ValidationError(ValueError):
    pass
