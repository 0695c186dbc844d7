"""Anonymity-enhancement mechanics over a safe-prime group.

Each coordinate X_j of a member tuple is committed as
``(CX_j, CG_j) = (X_j * h^r_j, g^r_j) mod P``. The GM, holding
``x = log_g h``, decrypts for tracing. A signer confirms by revealing the
r_j; a non-signer denies with a GM-issued token ``h^r_j`` by recommitting
their own coordinate under the same randomness.

Tuple values are embedded directly in Z_P* (P > n) and generally lie
outside the order-Q subgroup, so these commitments do not hide X_j in the
semantic-security sense.
"""

import hashlib
from dataclasses import dataclass

from . import kvfile
from .encoding import encode_int, encode_ints, tag
from .enrollment import MEMBER_ID_RE, MemberCredential, verify_certificate
from .errors import CannotDenyError, FormatError, MalformedBundleError, ParameterError
from .grouppk import GroupPublicKey, GroupSecretKey, gm_certify, gm_check_certificate
from .gsig import (
    SIGNATURE_FIELDS,
    GroupSignature,
    sign,
    signature_fields,
    signature_from_fields,
    verify,
)
from .numtheory import gen_safe_prime, is_probable_prime, mod_inv
from .rng import randrange
from .spk import STANDARD, ChallengeOracle

GENERATOR = 4  # 2^2: a quadratic residue != 1, hence of order Q, for any safe prime P > 5


@dataclass(frozen=True)
class EnhancedParams:
    P: int
    Q: int
    g: int
    h: int

    def __post_init__(self):
        if self.P < 7 or self.P != 2 * self.Q + 1:
            raise ParameterError("P must be a safe prime 2Q + 1")
        if not 1 < self.g < self.P or pow(self.g, self.Q, self.P) != 1:
            raise ParameterError("g must generate the order-Q subgroup")
        if not 0 < self.h < self.P or pow(self.h, self.Q, self.P) != 1:
            raise ParameterError("h must lie in the subgroup generated by g")


@dataclass(frozen=True)
class TraceKey:
    x: int


@dataclass(frozen=True)
class CommitmentBundle:
    cx: tuple[int, ...]
    cg: tuple[int, ...]


@dataclass(frozen=True)
class RevealProof:
    r: tuple[int, ...]


@dataclass(frozen=True)
class DenyToken:
    bundle_digest: bytes
    j: int
    token: int
    cert: int


@dataclass(frozen=True)
class EnhancedDenyProof:
    token: DenyToken
    nonce: bytes
    fresh_sig: GroupSignature
    prover_id: str
    certificate: int
    recommitted: int


def eg_setup(bits: int, n_floor: int, rng) -> tuple[EnhancedParams, TraceKey]:
    if bits < 4 or (1 << (bits - 1)) <= n_floor:
        raise ParameterError(f"{bits}-bit primes cannot exceed the floor {n_floor}")
    P, Q = gen_safe_prime(bits, rng)
    x = randrange(rng, 1, Q)
    return EnhancedParams(P, Q, GENERATOR, pow(GENERATOR, x, P)), TraceKey(x)


def toy_params() -> tuple[EnhancedParams, TraceKey]:
    """P = 23, Q = 11, g = 4, x = 3 (h = 18)."""
    return EnhancedParams(23, 11, 4, 18), TraceKey(3)


def commit_tuple(params: EnhancedParams, public, rng=None, *, randomness=None):
    """Return ``(bundle, reveal)``; ``randomness`` pins the r_j (0 allowed only here)."""
    P = params.P
    if any(not 0 < X < P for X in public):
        raise ParameterError("tuple values must lie in [1, P)")
    if randomness is None:
        randomness = [randrange(rng, 1, params.Q) for _ in public]
    elif len(randomness) != len(public) or any(not 0 <= r < params.Q for r in randomness):
        raise ParameterError("need one r in [0, Q) per coordinate")
    cx = tuple(X * pow(params.h, r, P) % P for X, r in zip(public, randomness))
    cg = tuple(pow(params.g, r, P) for r in randomness)
    return CommitmentBundle(cx, cg), RevealProof(tuple(randomness))


def trace(params: EnhancedParams, key: TraceKey, bundle: CommitmentBundle) -> tuple[int, ...]:
    P = params.P
    if len(bundle.cx) != len(bundle.cg):
        raise MalformedBundleError("bundle halves differ in length")
    out = []
    for cx, cg in zip(bundle.cx, bundle.cg):
        if not 0 < cg < P or not 0 < cx < P:
            raise MalformedBundleError("bundle value outside Z_P*")
        out.append(cx * mod_inv(pow(cg, key.x, P), P) % P)
    return tuple(out)


def confirm_reveal(reveal_secret) -> RevealProof:
    return RevealProof(tuple(reveal_secret))


def verify_confirm_reveal(params: EnhancedParams, bundle: CommitmentBundle,
                          reveal: RevealProof, claimed) -> bool:
    P = params.P
    if not len(bundle.cx) == len(bundle.cg) == len(reveal.r) == len(claimed):
        return False
    for cx, cg, r, X in zip(bundle.cx, bundle.cg, reveal.r, claimed):
        if not 0 <= r < params.Q or not 0 < X < P:
            return False
        if cg != pow(params.g, r, P) or cx != X * pow(params.h, r, P) % P:
            return False
    return True


def bundle_digest(bundle: CommitmentBundle) -> bytes:
    return hashlib.sha256(dump_bundle(bundle).encode("utf-8")).digest()


def _token_payload(params, digest, j, token) -> bytes:
    return encode_ints([params.P, params.Q, params.g, params.h]) + digest + encode_ints([j, token])


def deny_token(params: EnhancedParams, key: TraceKey, bundle: CommitmentBundle, j: int,
               pk: GroupPublicKey, sk: GroupSecretKey) -> DenyToken:
    """GM releases h^r_j = CG_j^x for coordinate ``j`` (0-based), certified under pk."""
    if not 0 <= j < len(bundle.cg):
        raise ParameterError("coordinate index out of range")
    if not 0 < bundle.cg[j] < params.P:
        raise MalformedBundleError("bundle value outside Z_P*")
    digest = bundle_digest(bundle)
    token = pow(bundle.cg[j], key.x, params.P)
    cert = gm_certify(pk, sk, "token", _token_payload(params, digest, j, token))
    return DenyToken(digest, j, token, cert)


def verify_token(params: EnhancedParams, pk: GroupPublicKey, bundle: CommitmentBundle,
                 token: DenyToken) -> bool:
    if token.bundle_digest != bundle_digest(bundle) or not 0 <= token.j < len(bundle.cx):
        return False
    if not 0 < token.token < params.P:
        return False
    payload = _token_payload(params, token.bundle_digest, token.j, token.token)
    return gm_check_certificate(pk, "token", payload, token.cert)


def recommit(value: int, token: int, P: int) -> int:
    return value * token % P


def _deny_message(token: DenyToken, nonce: bytes) -> bytes:
    return tag("eg-deny-proof") + token.bundle_digest + encode_int(token.j) + nonce


def make_enhanced_deny(params: EnhancedParams, pk: GroupPublicKey, bundle: CommitmentBundle,
                       token: DenyToken, cred: MemberCredential, nonce: bytes,
                       oracle: ChallengeOracle = STANDARD, rng=None) -> EnhancedDenyProof:
    """Recommit the prover's own coordinate with the token and sign a fresh message."""
    if token.bundle_digest != bundle_digest(bundle):
        raise ParameterError("token was issued for a different bundle")
    own = cred.public[token.j]
    if not 0 < own < params.P:
        raise ParameterError("tuple value does not fit in Z_P*")
    cx_prime = recommit(own, token.token, params.P)
    if cx_prime == bundle.cx[token.j]:
        raise CannotDenyError("own coordinate equals the committed one")
    nonce = bytes(nonce)
    if not nonce:
        raise ParameterError("nonce must not be empty")
    fresh = sign(pk, cred, _deny_message(token, nonce), oracle, rng)
    return EnhancedDenyProof(token, nonce, fresh, cred.member_id, cred.certificate, cx_prime)


def verify_enhanced_deny(params: EnhancedParams, pk: GroupPublicKey, bundle: CommitmentBundle,
                         proof: EnhancedDenyProof, nonce: bytes,
                         oracle: ChallengeOracle = STANDARD) -> bool:
    token = proof.token
    if proof.nonce != bytes(nonce) or not verify_token(params, pk, bundle, token):
        return False
    mine = proof.fresh_sig.tuple
    if len(mine) != len(bundle.cx) or not MEMBER_ID_RE.fullmatch(proof.prover_id):
        return False
    if not verify_certificate(pk, proof.prover_id, mine, proof.certificate):
        return False
    if not 0 < mine[token.j] < params.P:
        return False
    expected = recommit(mine[token.j], token.token, params.P)
    if proof.recommitted != expected or expected == bundle.cx[token.j]:
        return False
    return verify(pk, _deny_message(token, proof.nonce), proof.fresh_sig, oracle)


PARAMS_FORMAT = "gsspccd-eg-v1"
KEY_FORMAT = "gsspccd-egkey-v1"
BUNDLE_FORMAT = "gsspccd-bundle-v1"
REVEAL_FORMAT = "gsspccd-reveal-v1"
TOKEN_FORMAT = "gsspccd-token-v1"
EGDENY_FORMAT = "gsspccd-egdeny-v1"


def dump_params(params: EnhancedParams) -> str:
    return kvfile.dump(PARAMS_FORMAT, [(name, kvfile.fmt_int(getattr(params, name)))
                                       for name in ("P", "Q", "g", "h")])


def load_params(text: str) -> EnhancedParams:
    f = kvfile.parse(text, PARAMS_FORMAT, ["P", "Q", "g", "h"])
    try:
        params = EnhancedParams(*(kvfile.parse_int(f[name]) for name in ("P", "Q", "g", "h")))
    except ParameterError as exc:
        raise FormatError(f"invalid parameters: {exc}") from exc
    if not (is_probable_prime(params.P) and is_probable_prime(params.Q)):
        raise FormatError("P and Q must be prime")
    return params


def dump_trace_key(key: TraceKey) -> str:
    return kvfile.dump(KEY_FORMAT, [("x", kvfile.fmt_int(key.x))])


def load_trace_key(text: str) -> TraceKey:
    return TraceKey(kvfile.parse_int(kvfile.parse(text, KEY_FORMAT, ["x"])["x"]))


def dump_bundle(bundle: CommitmentBundle) -> str:
    return kvfile.dump(BUNDLE_FORMAT, [("cx", kvfile.fmt_ints(bundle.cx)),
                                       ("cg", kvfile.fmt_ints(bundle.cg))])


def load_bundle(text: str) -> CommitmentBundle:
    f = kvfile.parse(text, BUNDLE_FORMAT, ["cx", "cg"])
    bundle = CommitmentBundle(kvfile.parse_ints(f["cx"]), kvfile.parse_ints(f["cg"]))
    if len(bundle.cx) != len(bundle.cg):
        raise FormatError("cx and cg differ in length")
    return bundle


def dump_reveal(reveal: RevealProof) -> str:
    return kvfile.dump(REVEAL_FORMAT, [("r", kvfile.fmt_ints(reveal.r))])


def load_reveal(text: str) -> RevealProof:
    return RevealProof(kvfile.parse_ints(kvfile.parse(text, REVEAL_FORMAT, ["r"])["r"]))


_TOKEN_FIELDS = ["digest", "coord", "token", "token_cert"]


def _token_fields(token: DenyToken):
    return [
        ("digest", token.bundle_digest.hex()),
        ("coord", kvfile.fmt_int(token.j)),
        ("token", kvfile.fmt_int(token.token)),
        ("token_cert", kvfile.fmt_int(token.cert)),
    ]


def _token_from_fields(f) -> DenyToken:
    digest = kvfile.parse_hex(f["digest"])
    if len(digest) != 32:
        raise FormatError("digest must be 32 bytes")
    return DenyToken(digest, kvfile.parse_int(f["coord"]), kvfile.parse_int(f["token"]),
                     kvfile.parse_int(f["token_cert"]))


def dump_token(token: DenyToken) -> str:
    return kvfile.dump(TOKEN_FORMAT, _token_fields(token))


def load_token(text: str) -> DenyToken:
    return _token_from_fields(kvfile.parse(text, TOKEN_FORMAT, _TOKEN_FIELDS))


def dump_enhanced_deny(proof: EnhancedDenyProof) -> str:
    return kvfile.dump(
        EGDENY_FORMAT,
        _token_fields(proof.token)
        + [("nonce", proof.nonce.hex())]
        + signature_fields(proof.fresh_sig)
        + [
            ("prover_id", proof.prover_id),
            ("cert", kvfile.fmt_int(proof.certificate)),
            ("recommitted", kvfile.fmt_int(proof.recommitted)),
        ],
    )


def load_enhanced_deny(text: str) -> EnhancedDenyProof:
    names = _TOKEN_FIELDS + ["nonce"] + SIGNATURE_FIELDS + ["prover_id", "cert", "recommitted"]
    f = kvfile.parse(text, EGDENY_FORMAT, names)
    if not MEMBER_ID_RE.fullmatch(f["prover_id"]):
        raise FormatError("malformed prover id")
    return EnhancedDenyProof(
        _token_from_fields(f),
        kvfile.parse_hex(f["nonce"]),
        signature_from_fields(f),
        f["prover_id"],
        kvfile.parse_int(f["cert"]),
        kvfile.parse_int(f["recommitted"]),
    )
