"""Sign, Verify, Open and Link for the basic (linkable) scheme."""

import hashlib
from dataclasses import dataclass

from . import kvfile
from .enrollment import MemberCredential, Registry, open_lookup
from .errors import ParameterError
from .grouppk import GroupPublicKey, linear_check, power_tuple
from .numtheory import is_unit, sample_unit
from .spk import STANDARD, ChallengeOracle


@dataclass(frozen=True)
class GroupSignature:
    tuple: tuple[int, ...]
    commitments: tuple[int, ...]
    responses: tuple[int, ...]
    challenge: int


def challenge_inputs(pk: GroupPublicKey, public, commitments) -> list[int]:
    return [pk.n, pk.k, *pk.exps, *public, *commitments]


def credential_ok(pk: GroupPublicKey, cred: MemberCredential) -> bool:
    if len(cred.public) != pk.k or len(cred.secret) != pk.k:
        return False
    if any(not is_unit(x, pk.n) for x in (*cred.public, *cred.secret)):
        return False
    return power_tuple(pk, cred.secret) == tuple(cred.public) and linear_check(pk, cred.public)


def sign(
    pk: GroupPublicKey,
    cred: MemberCredential,
    message: bytes,
    oracle: ChallengeOracle = STANDARD,
    rng=None,
    *,
    nonces=None,
) -> GroupSignature:
    """AND-composition of k root SPKs under one shared challenge.

    ``nonces`` pins the per-coordinate randomness (test vectors only).
    """
    if not credential_ok(pk, cred):
        raise ParameterError("credential is not valid under this group key")
    n = pk.n
    if nonces is None:
        nonces = [sample_unit(n, rng) for _ in range(pk.k)]
    elif len(nonces) != pk.k or any(not is_unit(r, n) for r in nonces):
        raise ParameterError("need k unit nonces")
    commitments = tuple(pow(r, e, n) for r, e in zip(nonces, pk.exps))
    c = oracle("gsig", challenge_inputs(pk, cred.public, commitments), message, pk.challenge_bits)
    responses = tuple(pow(x, c, n) * r % n for x, r in zip(cred.secret, nonces))
    return GroupSignature(tuple(cred.public), commitments, responses, c)


def verify(pk: GroupPublicKey, message: bytes, sig: GroupSignature,
           oracle: ChallengeOracle = STANDARD) -> bool:
    n, k = pk.n, pk.k
    if not (len(sig.tuple) == len(sig.commitments) == len(sig.responses) == k):
        return False
    if any(not is_unit(v, n) for v in (*sig.tuple, *sig.commitments, *sig.responses)):
        return False
    if not linear_check(pk, sig.tuple):
        return False
    if not oracle.is_forced and not 0 <= sig.challenge < (1 << pk.challenge_bits):
        return False
    c = oracle("gsig", challenge_inputs(pk, sig.tuple, sig.commitments), message, pk.challenge_bits)
    if sig.challenge != c:
        return False
    return all(
        pow(t, e, n) == pow(X, c, n) * T % n
        for X, T, t, e in zip(sig.tuple, sig.commitments, sig.responses, pk.exps)
    )


def open(registry: Registry, sig: GroupSignature) -> str | None:  # noqa: A001
    return open_lookup(registry, sig.tuple)


def link(sig_a: GroupSignature, sig_b: GroupSignature) -> bool:
    return tuple(sig_a.tuple) == tuple(sig_b.tuple)


SIGNATURE_FORMAT = "gsspccd-sig-v1"
SIGNATURE_FIELDS = ["tuple", "commitments", "responses", "challenge"]


def signature_fields(sig: GroupSignature) -> list[tuple[str, str]]:
    return [
        ("tuple", kvfile.fmt_ints(sig.tuple)),
        ("commitments", kvfile.fmt_ints(sig.commitments)),
        ("responses", kvfile.fmt_ints(sig.responses)),
        ("challenge", kvfile.fmt_int(sig.challenge)),
    ]


def signature_from_fields(f: dict[str, str]) -> GroupSignature:
    return GroupSignature(
        kvfile.parse_ints(f["tuple"]),
        kvfile.parse_ints(f["commitments"]),
        kvfile.parse_ints(f["responses"]),
        kvfile.parse_int(f["challenge"]),
    )


def dump_signature(sig: GroupSignature) -> str:
    return kvfile.dump(SIGNATURE_FORMAT, signature_fields(sig))


def load_signature(text: str) -> GroupSignature:
    return signature_from_fields(kvfile.parse(text, SIGNATURE_FORMAT, SIGNATURE_FIELDS))


def signature_digest(sig: GroupSignature) -> bytes:
    """SHA-256 of the canonical signature file bytes."""
    return hashlib.sha256(dump_signature(sig).encode("utf-8")).digest()
