"""Sigma-protocol signatures of knowledge.

Two families: knowledge of an e-th root modulo an RSA modulus
(Guillou-Quisquater style, used by the group signature) and knowledge of a
discrete logarithm (Schnorr). Each comes with prover, verifier,
zero-knowledge simulator and two-transcript extractor.
"""

import hashlib
from collections.abc import Sequence
from dataclasses import dataclass

from .encoding import encode_ints, encode_message, tag
from .errors import ExtractionInfeasibleError, ParameterError
from .numtheory import egcd, is_unit, mod_inv, mod_pow, sample_unit
from .rng import randbelow


@dataclass(frozen=True)
class ChallengeOracle:
    """Fiat-Shamir challenge source.

    With ``forced`` unset the challenge is the top ``bits`` bits of
    SHA-256 over the canonical transcript. A forced value replaces the hash
    outright; it exists to replay fixed worked examples and to program the
    oracle for simulated transcripts.
    """

    forced: int | None = None

    @property
    def is_forced(self) -> bool:
        return self.forced is not None

    def __call__(self, context: str, ints: Sequence[int], message: bytes, bits: int) -> int:
        if self.forced is not None:
            return self.forced
        if not 1 <= bits <= 256:
            raise ParameterError("challenge bits must be in [1, 256]")
        data = tag(context) + encode_ints(ints) + encode_message(message)
        digest = int.from_bytes(hashlib.sha256(data).digest(), "big")
        return digest >> (256 - bits)


STANDARD = ChallengeOracle()


@dataclass(frozen=True)
class RootSpkTranscript:
    T: int
    t: int
    c: int


@dataclass(frozen=True)
class DlogSpkTranscript:
    R: int
    s: int


def _root_context(n, e, X, T):
    return [n, 1, e, X, T]


def root_spk_sign(x, e, X, n, message: bytes, oracle=STANDARD, rng=None,
                  *, bits: int = 128, nonce: int | None = None) -> RootSpkTranscript:
    """SPK{x : X = x^e mod n}(message); ``nonce`` pins r for test vectors."""
    if not (is_unit(x, n) and is_unit(X, n)) or pow(x, e, n) != X:
        raise ParameterError("witness does not match statement")
    r = sample_unit(n, rng) if nonce is None else nonce
    if not is_unit(r, n):
        raise ParameterError("nonce must be a unit mod n")
    T = pow(r, e, n)
    c = oracle("root-spk", _root_context(n, e, X, T), message, bits)
    t = pow(x, c, n) * r % n
    return RootSpkTranscript(T, t, c)


def root_relation_holds(T, t, c, e, X, n) -> bool:
    """t^e == X^c * T (mod n) with T, t units."""
    if not (is_unit(T, n) and is_unit(t, n)) or c < 0:
        return False
    return pow(t, e, n) == pow(X, c, n) * T % n


def root_spk_verify(tr: RootSpkTranscript, e, X, n, message: bytes, oracle=STANDARD,
                    *, bits: int = 128) -> bool:
    if not is_unit(X, n):
        return False
    if tr.c != oracle("root-spk", _root_context(n, e, X, tr.T), message, bits):
        return False
    return root_relation_holds(tr.T, tr.t, tr.c, e, X, n)


def root_spk_simulate(X, e, n, c, rng) -> RootSpkTranscript:
    """Witness-free transcript: pick t, back-solve T = t^e * X^-c."""
    if not is_unit(X, n):
        raise ParameterError("statement must be a unit mod n")
    t = sample_unit(n, rng)
    T = pow(t, e, n) * mod_pow(X, -c, n) % n
    return RootSpkTranscript(T, t, c)


def root_spk_extract(T, c1, t1, c2, t2, e, X, n) -> int:
    """Recover x with x^e == X from two accepting transcripts sharing T."""
    if not (root_relation_holds(T, t1, c1, e, X, n) and root_relation_holds(T, t2, c2, e, X, n)):
        raise ParameterError("both transcripts must satisfy the verification relation")
    delta = c1 - c2
    g, u, v = egcd(e, abs(delta))
    if g != 1:
        raise ExtractionInfeasibleError(f"gcd(c1 - c2, e) = {g}")
    if delta < 0:
        v = -v
    # (t1/t2)^e = X^delta and u*e + v*delta = 1
    ratio = t1 * mod_inv(t2, n) % n
    return mod_pow(X, u, n) * mod_pow(ratio, v, n) % n


def _check_dlog_group(g, p, q_order):
    if p < 3 or q_order < 2 or (p - 1) % q_order != 0:
        raise ParameterError("q_order must divide p - 1")
    if not 1 < g < p or pow(g, q_order, p) != 1:
        raise ParameterError("g must have order q_order")


def dlog_challenge_bits(q_order: int) -> int:
    return max(1, min(256, q_order.bit_length() - 1))


def _dlog_context(p, g, h, R):
    return [p, g, h, R]


def dlog_spk_sign(x, g, h, p, q_order, message: bytes, oracle=STANDARD, rng=None,
                  *, nonce: int | None = None) -> DlogSpkTranscript:
    """Schnorr SPK{x : h = g^x mod p}(message); challenges are below q_order."""
    _check_dlog_group(g, p, q_order)
    if pow(g, x, p) != h % p:
        raise ParameterError("h != g^x mod p")
    r = randbelow(rng, q_order) if nonce is None else nonce
    R = pow(g, r, p)
    c = oracle("dlog-spk", _dlog_context(p, g, h, R), message, dlog_challenge_bits(q_order))
    return DlogSpkTranscript(R, (r + c * x) % q_order)


def dlog_relation_holds(R, s, c, g, h, p) -> bool:
    if not 0 < R < p:
        return False
    return pow(g, s, p) == R * pow(h, c, p) % p


def dlog_spk_verify(tr: DlogSpkTranscript, g, h, p, q_order, message: bytes,
                    oracle=STANDARD) -> bool:
    try:
        _check_dlog_group(g, p, q_order)
    except ParameterError:
        return False
    if not 0 <= tr.s < q_order:
        return False
    c = oracle("dlog-spk", _dlog_context(p, g, h, tr.R), message, dlog_challenge_bits(q_order))
    return dlog_relation_holds(tr.R, tr.s, c, g, h, p)


def dlog_spk_simulate(g, h, p, q_order, c, rng) -> DlogSpkTranscript:
    """Pick s, back-solve R = g^s / h^c."""
    _check_dlog_group(g, p, q_order)
    s = randbelow(rng, q_order)
    R = pow(g, s, p) * mod_pow(h, -c, p) % p
    return DlogSpkTranscript(R, s)


def dlog_spk_extract(R, c1, s1, c2, s2, q_order) -> int:
    """x = (s1 - s2) / (c1 - c2) mod q_order."""
    if (c1 - c2) % q_order == 0:
        raise ExtractionInfeasibleError("challenges coincide modulo the group order")
    return (s1 - s2) * mod_inv((c1 - c2) % q_order, q_order) % q_order
