"""Exception hierarchy shared across the package."""


class WpdbError(Exception):
    """Base class for all errors raised by wpdb."""


class InvalidParameterError(WpdbError, ValueError):
    """A parameter is outside its admissible domain."""


class DegeneratePolicyError(WpdbError, ValueError):
    """An energy-harvesting configuration collapses relay power to 0 or infinity."""


class SingularChannelError(WpdbError, ArithmeticError):
    """A relay-to-destination channel is too weak to invert."""
