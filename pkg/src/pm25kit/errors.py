"""Exception hierarchy shared across the toolkit.

Everything derives from ``ValueError`` so callers that only care about
"bad input" can catch one type.
"""


class PM25Error(ValueError):
    pass


class SchemaError(PM25Error):
    """CSV header is missing a required column."""


class DuplicateCountryError(PM25Error):
    pass


class ValidationError(PM25Error):
    """A record violates a field invariant (negative area, bad year, ...)."""


class DegenerateInputError(PM25Error):
    """Statistic is undefined for the input (zero variance, too few points)."""


class InsufficientDataError(PM25Error):
    pass


class DegenerateFitError(PM25Error):
    pass


class EmptyStudyError(DegenerateInputError):
    """A study has nothing to compute on; the CLI maps this to exit code 2."""
