"""Shared exception base.

Every validation or format problem raised by this package derives from
:class:`NegareError`, so callers (and the CLI's exit-code mapping) can treat
"bad input" uniformly without catching bare ``ValueError``.
"""


class NegareError(ValueError):
    """Base class for all corpus/lexicon/prediction validation errors."""
