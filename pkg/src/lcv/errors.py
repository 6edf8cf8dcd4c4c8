"""Exception hierarchy.

Input problems (bad names, bad files, exceeded caps) and failed mathematical
verifications are kept apart so the command line can map them to different
exit codes.
"""


class LcvError(Exception):
    pass


class AlgebraError(LcvError, ValueError):
    """Malformed input: unknown generator, mixed algebras, bad degrees."""


class LimitError(LcvError):
    """A configured size cap (degree, monomial length, exponent) was exceeded."""


class FormatError(LcvError):
    """Unreadable or schema-violating algebra file."""


class VerificationError(LcvError):
    """A mathematical check failed. `report` carries the evidence when available."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NilpotencyError(VerificationError):
    pass


class MorphismError(VerificationError):
    pass


class HomotopyError(VerificationError):
    pass


class NormalityError(VerificationError):
    pass


class WeakInverseError(VerificationError):
    pass
