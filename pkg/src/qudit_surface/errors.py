"""Exception hierarchy shared by every module."""


class QuditSurfaceError(Exception):
    """Base class for library errors."""


class FieldError(QuditSurfaceError, ValueError):
    pass


class ComplexError(QuditSurfaceError, ValueError):
    """A two-complex violates one of its structural invariants."""


class ParseError(QuditSurfaceError, ValueError):
    """Malformed input file; ``where`` names the offending field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class PauliError(QuditSurfaceError, ValueError):
    pass


class NonCommutingError(PauliError):
    pass


class InconsistentStabilizerError(PauliError):
    pass


class CapExceededError(QuditSurfaceError, MemoryError):
    """Requested dense object is larger than the configured amplitude cap."""

    def __init__(self, required: int, cap: int):
        super().__init__(f"dense size {required} exceeds cap {cap}")
        self.required = required
        self.cap = cap


class ProtocolError(QuditSurfaceError, RuntimeError):
    pass
