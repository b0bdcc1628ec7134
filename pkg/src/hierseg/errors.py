"""Exception types shared across the library."""


class HiersegError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(HiersegError):
    """An input value violates a documented precondition."""


class FormatError(HiersegError):
    """A byte stream does not parse as the expected file format.

    Carries the byte offset at which parsing failed.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class NoPathError(HiersegError):
    """Two vertices lie in different connected components."""


class UnsupportedTopologyError(HiersegError):
    """An operation requiring a pixel-grid graph received something else."""


class GraphTooLargeError(HiersegError):
    """An exhaustive oracle was asked to enumerate an infeasible instance."""
