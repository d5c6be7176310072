"""Exception hierarchy shared across the package.

Two broad families matter to callers (and to the CLI's exit codes):
input-format errors (malformed files) and configuration errors (valid
files combined in an unusable way). Everything else subclasses one of
these or the common base.
"""


class MoranLabError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(MoranLabError):
    """A graph, type, or distribution document could not be parsed."""


class ConfigurationError(MoranLabError):
    """Inputs parsed fine but cannot be combined as requested."""
