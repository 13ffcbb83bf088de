"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints
verbatim, so callers can branch on it without parsing messages.
"""


class TuranKitError(ValueError):
    code = "ERROR"


class DomainError(TuranKitError):
    """A parameter lies outside the domain of the requested operation."""

    code = "DOMAIN"


class OutOfRangeError(TuranKitError):
    """A coefficient was requested beyond the end of a finite table."""

    code = "OUT_OF_RANGE"


class SingularityError(TuranKitError):
    """A formula's denominator vanishes."""

    code = "SINGULAR"


class WrongHypothesisError(TuranKitError):
    """The spec does not satisfy a structural hypothesis (symmetry, normalization)."""

    code = "WRONG_HYPOTHESIS"


class InstabilityError(TuranKitError):
    code = "INSTABILITY"


class DivergenceError(TuranKitError):
    code = "DIVERGENCE"


class AnomalyError(TuranKitError):
    code = "ANOMALY"
