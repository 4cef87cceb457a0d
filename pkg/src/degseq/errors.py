"""Exception types shared across the package."""


class DegSeqError(Exception):
    """Base class for all package errors."""


class DegreeFileError(DegSeqError, ValueError):
    """Malformed degree-sequence or edge-list input."""


class NotGraphical(DegSeqError):
    """A sequence handed to the realizer violates the Erdős–Gallai conditions."""


class NoSwapPair(DegSeqError):
    """The delete-two/add-three repair found no usable edge.

    Unreachable for graphical input; seeing this means an internal bug.
    """


class TooLarge(DegSeqError):
    """Exhaustive enumeration requested beyond its size limit."""


class CapExceeded(DegSeqError):
    """A sampled degree exceeded the distribution's ``support_max``."""


class InvalidTail(DegSeqError, ValueError):
    """A tail function is not a valid law of a positive integer variable."""


class DegenerateParity(DegSeqError):
    """P(D even) is 0 or 1, so the parity bias is not in (-1, 1)."""
