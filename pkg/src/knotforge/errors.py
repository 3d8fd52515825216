"""Exception types shared across the package."""


class KnotforgeError(Exception):
    """Base class for all package errors."""


class Malformed(KnotforgeError, ValueError):
    """Input code or serialization violates its format contract."""


class NonPlanar(KnotforgeError, ValueError):
    """A rotation system that does not embed in the sphere (genus != 0)."""


class InvalidDiagram(KnotforgeError, ValueError):
    """Operation received a diagram that fails its invariants."""


class NotApplicable(KnotforgeError, ValueError):
    """Operator applied at a locus that does not satisfy its predicate."""


class PositiveGroupError(KnotforgeError, ValueError):
    """Core requested for a group that is not negative."""


class CapExceeded(KnotforgeError, RuntimeError):
    """A flype closure grew past the configured cap.

    Never a silent truncation: the caller is expected to retry with a
    larger cap.
    """

    def __init__(self, cap, context=""):
        self.cap = cap
        self.context = context
        msg = f"flype closure exceeded cap of {cap}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class StoreError(KnotforgeError, IOError):
    """Knot store I/O or consistency failure."""
