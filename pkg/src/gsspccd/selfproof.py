"""Confirming and denying proofs for a contested group signature.

Both proofs are fresh group signatures on a message derived from the
contested signature's digest and a verifier-chosen nonce. A confirm proof
reuses the contested tuple; a deny proof uses the prover's own certified
tuple, which must differ from the contested one in every coordinate.
"""

from dataclasses import dataclass

from . import kvfile
from .encoding import tag
from .enrollment import MEMBER_ID_RE, MemberCredential, verify_certificate
from .errors import CannotDenyError, FormatError, NotTheSignerError, ParameterError
from .grouppk import GroupPublicKey
from .gsig import (
    SIGNATURE_FIELDS,
    GroupSignature,
    sign,
    signature_digest,
    signature_fields,
    signature_from_fields,
    verify,
)
from .spk import STANDARD, ChallengeOracle

MIN_NONCE_BYTES = 16
CONFIRM = "confirm"
DENY = "deny"


@dataclass(frozen=True)
class ProofContext:
    purpose: str
    contested_digest: bytes
    nonce: bytes

    def message(self) -> bytes:
        # digest is fixed-width, so the nonce needs no length prefix
        return tag(self.purpose + "-proof") + self.contested_digest + self.nonce


@dataclass(frozen=True)
class ConfirmProof:
    context: ProofContext
    fresh_sig: GroupSignature


@dataclass(frozen=True)
class DenyProof:
    context: ProofContext
    fresh_sig: GroupSignature
    prover_id: str
    certificate: int


def _context(purpose, contested, nonce, oracle) -> ProofContext:
    nonce = bytes(nonce)
    if not nonce:
        raise ParameterError("nonce must not be empty")
    if not oracle.is_forced and len(nonce) < MIN_NONCE_BYTES:
        raise ParameterError(f"nonce must be at least {MIN_NONCE_BYTES} bytes")
    return ProofContext(purpose, signature_digest(contested), nonce)


def _context_matches(proof_ctx, purpose, contested, nonce) -> bool:
    return (
        proof_ctx.purpose == purpose
        and proof_ctx.contested_digest == signature_digest(contested)
        and proof_ctx.nonce == bytes(nonce)
    )


def make_confirm(pk: GroupPublicKey, cred: MemberCredential, contested: GroupSignature,
                 nonce: bytes, oracle: ChallengeOracle = STANDARD, rng=None) -> ConfirmProof:
    if tuple(cred.public) != tuple(contested.tuple):
        raise NotTheSignerError("credential tuple differs from the contested signature")
    ctx = _context(CONFIRM, contested, nonce, oracle)
    return ConfirmProof(ctx, sign(pk, cred, ctx.message(), oracle, rng))


def verify_confirm(pk: GroupPublicKey, contested: GroupSignature, proof: ConfirmProof,
                   nonce: bytes, oracle: ChallengeOracle = STANDARD) -> bool:
    if not _context_matches(proof.context, CONFIRM, contested, nonce):
        return False
    if tuple(proof.fresh_sig.tuple) != tuple(contested.tuple):
        return False
    return verify(pk, proof.context.message(), proof.fresh_sig, oracle)


def make_deny(pk: GroupPublicKey, cred: MemberCredential, contested: GroupSignature,
              nonce: bytes, oracle: ChallengeOracle = STANDARD, rng=None) -> DenyProof:
    if len(cred.public) != len(contested.tuple) or any(
        a == b for a, b in zip(cred.public, contested.tuple)
    ):
        raise CannotDenyError("credential shares a coordinate with the contested signature")
    ctx = _context(DENY, contested, nonce, oracle)
    fresh = sign(pk, cred, ctx.message(), oracle, rng)
    return DenyProof(ctx, fresh, cred.member_id, cred.certificate)


def verify_deny(pk: GroupPublicKey, contested: GroupSignature, proof: DenyProof,
                nonce: bytes, oracle: ChallengeOracle = STANDARD) -> bool:
    if not _context_matches(proof.context, DENY, contested, nonce):
        return False
    mine, theirs = proof.fresh_sig.tuple, contested.tuple
    if len(mine) != len(theirs) or any(a == b for a, b in zip(mine, theirs)):
        return False
    if not MEMBER_ID_RE.fullmatch(proof.prover_id):
        return False
    if not verify_certificate(pk, proof.prover_id, mine, proof.certificate):
        return False
    return verify(pk, proof.context.message(), proof.fresh_sig, oracle)


CONFIRM_FORMAT = "gsspccd-confirm-v1"
DENY_FORMAT = "gsspccd-deny-v1"
_CONTEXT_FIELDS = ["digest", "nonce"]


def _context_fields(ctx):
    return [("digest", ctx.contested_digest.hex()), ("nonce", ctx.nonce.hex())]


def _parse_context(purpose, f):
    digest = kvfile.parse_hex(f["digest"])
    if len(digest) != 32:
        raise FormatError("digest must be 32 bytes")
    return ProofContext(purpose, digest, kvfile.parse_hex(f["nonce"]))


def dump_confirm(proof: ConfirmProof) -> str:
    return kvfile.dump(CONFIRM_FORMAT, _context_fields(proof.context) + signature_fields(proof.fresh_sig))


def load_confirm(text: str) -> ConfirmProof:
    f = kvfile.parse(text, CONFIRM_FORMAT, _CONTEXT_FIELDS + SIGNATURE_FIELDS)
    return ConfirmProof(_parse_context(CONFIRM, f), signature_from_fields(f))


def dump_deny(proof: DenyProof) -> str:
    return kvfile.dump(
        DENY_FORMAT,
        _context_fields(proof.context)
        + signature_fields(proof.fresh_sig)
        + [("prover_id", proof.prover_id), ("cert", kvfile.fmt_int(proof.certificate))],
    )


def load_deny(text: str) -> DenyProof:
    f = kvfile.parse(text, DENY_FORMAT, _CONTEXT_FIELDS + SIGNATURE_FIELDS + ["prover_id", "cert"])
    if not MEMBER_ID_RE.fullmatch(f["prover_id"]):
        raise FormatError("malformed prover id")
    return DenyProof(
        _parse_context(DENY, f), signature_from_fields(f), f["prover_id"], kvfile.parse_int(f["cert"])
    )
