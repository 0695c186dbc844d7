"""Group signatures with self-proof of authorship and non-authorship."""

from .enrollment import (
    MemberCredential,
    Registry,
    issue_credential,
    open_lookup,
    verify_certificate,
)
from .errors import (
    CannotDenyError,
    ExtractionInfeasibleError,
    FormatError,
    GenerationError,
    GsError,
    MalformedBundleError,
    NotInvertibleError,
    NotTheSignerError,
    ParameterError,
    UniquenessError,
)
from .grouppk import GroupPublicKey, GroupSecretKey, linear_check, worked_example, poly_check, setup
from .gsig import GroupSignature, link, open, sign, verify
from .rng import HashStream
from .selfproof import make_confirm, make_deny, verify_confirm, verify_deny
from .spk import STANDARD, ChallengeOracle

__version__ = "0.1.0"
