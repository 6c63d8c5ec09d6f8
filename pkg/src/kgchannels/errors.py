"""Exception types shared across the package."""


class KGChannelsError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(KGChannelsError, ValueError):
    pass


class GridMismatch(KGChannelsError, ValueError):
    pass


class SupportOverflow(KGChannelsError, ValueError):
    """A support (plus the required margin) does not fit inside the periodic box."""


class CausalMarginExceeded(KGChannelsError, ValueError):
    """Evolving for the requested time would let the causal cone wrap around the box."""


class MassNonPositive(KGChannelsError, ValueError):
    pass


class CFLViolation(KGChannelsError, ValueError):
    pass


class UnsupportedLocalization(KGChannelsError, ValueError):
    """A test function straddles the transition shell of a localized rotation."""


class GeometryViolation(KGChannelsError, ValueError):
    pass


class ConfigError(KGChannelsError, ValueError):
    pass


class ResourceLimitExceeded(KGChannelsError, RuntimeError):
    pass
