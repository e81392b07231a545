"""Exception types shared across the package."""


class MirrorCatError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MirrorCatError):
    """Invalid, missing, or contradictory configuration input."""


class TruncationError(MirrorCatError):
    """A truncated Fock basis is too small for the requested accuracy."""


class UnidentifiableInversionError(MirrorCatError):
    """The readout probability carries no information about the mirror rate.

    Raised when cos(2 pi kappa^2) is numerically zero, so the measured
    probability is independent of the dephasing rate.
    """


class InfeasibleMeasurementError(MirrorCatError):
    """The measured probability is inconsistent with the readout model."""
