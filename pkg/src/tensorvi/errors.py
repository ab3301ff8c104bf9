class TviError(Exception):
    """Base class for errors raised by tensorvi."""


class DimensionError(TviError, ValueError):
    """Shapes of tensors, vectors or sets do not agree."""


class ProjectionError(TviError):
    """A projection could not be computed (empty set or no convergence)."""


class DocumentError(TviError, ValueError):
    """A problem or game document failed validation.

    ``pointer`` is a JSON-pointer style location such as ``/tensor/3/idx``.
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")
