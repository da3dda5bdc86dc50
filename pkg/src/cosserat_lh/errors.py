"""Exception types."""


class CosseratError(Exception):
    pass


class NotSkew(CosseratError, ValueError):
    pass


class NotRotation(CosseratError, ValueError):
    pass


class GridTooCoarse(CosseratError, ValueError):
    pass


class SkewnessViolated(CosseratError):
    pass


class InvalidFace(CosseratError, KeyError):
    pass


class InadmissiblePair(CosseratError, ValueError):
    pass


class ZeroDirection(CosseratError, ValueError):
    pass


class ProbeOutsideDomain(CosseratError, ValueError):
    pass


class DriftExceeded(CosseratError, ArithmeticError):
    pass


class ConfigError(CosseratError, ValueError):
    pass


class NotEquilibratedWarning(UserWarning):
    """The state fails the first-variation gate; the second variation is not
    interpretable as a stability measure."""
