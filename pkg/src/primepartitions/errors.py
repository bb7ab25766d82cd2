"""Error types shared across the package.

Invalid arguments and out-of-range inputs raise plain ValueError; the
classes below mark conditions a caller may want to handle separately
(and that the CLI maps to distinct exit codes).
"""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size or time budget."""


class CoefficientOverflowError(OverflowError):
    """A series coefficient left the supported 128-bit unsigned range."""


class ConsistencyError(RuntimeError):
    """Two computation paths that must agree exactly did not; signals a bug."""
