"""Exception types shared across the package."""


class GowersAPError(Exception):
    pass


class CapacityError(GowersAPError):
    """Requested table would exceed the configured memory budget."""


class CostError(GowersAPError):
    """Requested computation exceeds the configured operation budget."""


class DegreeError(GowersAPError, ValueError):
    pass


class DomainError(GowersAPError, ValueError):
    pass


class CoverageError(GowersAPError, ValueError):
    """A table or tabulation does not reach far enough for the request."""


class HypothesisError(GowersAPError, ValueError):
    """Parameters violate a standing hypothesis (the message names it)."""


class ConfigError(GowersAPError, ValueError):
    pass
