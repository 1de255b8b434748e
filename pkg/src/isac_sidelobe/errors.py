"""Exception types raised across the package.

Every error is a ``ValueError`` subclass so callers that only care about
bad input can catch ``ValueError``; the CLI maps them to usage errors.
"""


class SidelobeError(ValueError):
    """Base class for all package errors."""

    kind = "error"


class InvalidOrder(SidelobeError):
    kind = "invalid-order"


class UnsupportedOrder(SidelobeError):
    kind = "unsupported-order"


class InvalidGeometry(SidelobeError):
    kind = "invalid-geometry"


class DegenerateConstellation(SidelobeError):
    kind = "degenerate-constellation"


class UnsupportedMomentStructure(SidelobeError):
    kind = "unsupported-moment-structure"


class UnsupportedSize(SidelobeError):
    kind = "unsupported-size"


class InvalidPhase(SidelobeError):
    kind = "invalid-phase"


class InvalidLag(SidelobeError):
    kind = "invalid-lag"


class InvalidArgument(SidelobeError):
    kind = "invalid-argument"


class InvalidDirection(SidelobeError):
    kind = "invalid-direction"


class OutOfWindow(SidelobeError):
    kind = "out-of-window"


class InvalidInput(SidelobeError):
    kind = "invalid-input"
