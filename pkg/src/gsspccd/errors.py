"""Exception hierarchy shared by every layer of the scheme."""


class GsError(Exception):
    """Base class for all scheme errors."""


class ParameterError(GsError, ValueError):
    """An argument violates a documented precondition."""


class NotInvertibleError(ParameterError):
    """Raised by modular inversion; ``gcd`` is a non-trivial common factor."""

    def __init__(self, a, modulus, gcd):
        super().__init__(f"{a} is not invertible modulo {modulus} (gcd={gcd})")
        self.a = a
        self.modulus = modulus
        self.gcd = gcd


class GenerationError(GsError):
    """A randomized search exhausted its retry budget."""


class UniquenessError(GsError):
    """A member id or tuple coordinate is already registered."""


class ExtractionInfeasibleError(GsError):
    """Two transcripts do not satisfy the extractor's gcd condition."""


class NotTheSignerError(GsError):
    """A confirm proof was requested by a member whose tuple differs."""


class CannotDenyError(GsError):
    """A deny proof was requested by a member sharing a coordinate."""


class MalformedBundleError(GsError):
    """A commitment bundle cannot be decrypted."""


class FormatError(GsError):
    """A file is not in canonical form for its declared format."""
