"""Group setup: RSA modulus, polynomial public key and the GM trapdoor."""

from dataclasses import dataclass
from math import gcd

from . import kvfile
from .encoding import hash_to_unit
from .errors import FormatError, GenerationError, ParameterError
from .numtheory import gen_prime, is_probable_prime, mod_inv, sample_unit
from .rng import randrange, system_rng

DEFAULT_CHALLENGE_BITS = 128
MAX_CHALLENGE_BITS = 256


@dataclass(frozen=True)
class GroupPublicKey:
    n: int
    coeffs: tuple[int, ...]  # a_0, a_1, ..., a_k
    exps: tuple[int, ...]  # e_1, ..., e_k
    cert_exp: int
    challenge_bits: int = DEFAULT_CHALLENGE_BITS

    def __post_init__(self):
        if len(self.coeffs) != len(self.exps) + 1:
            raise ParameterError("need exactly one more coefficient than exponents")
        if self.k < 2:
            raise ParameterError("k must be >= 2")
        if not 1 <= self.challenge_bits <= MAX_CHALLENGE_BITS:
            raise ParameterError(f"challenge_bits must be in [1, {MAX_CHALLENGE_BITS}]")
        if not 0 <= self.coeffs[0] < self.n:
            raise ParameterError("a_0 out of range")
        if any(not 1 <= a < self.n for a in self.coeffs[1:]):
            raise ParameterError("a_j out of range")
        if gcd(self.coeffs[-1], self.n) != 1:
            raise ParameterError("a_k must be invertible mod n")
        if any(e < 3 for e in self.exps) or self.cert_exp < 3:
            raise ParameterError("public exponents must be >= 3")

    @property
    def k(self) -> int:
        return len(self.exps)

    @property
    def is_sound(self) -> bool:
        """Whether every exponent exceeds the challenge space (GQ special soundness)."""
        return min(self.exps) > (1 << self.challenge_bits)


@dataclass(frozen=True)
class GroupSecretKey:
    p: int
    q: int
    phi: int
    inv_exps: tuple[int, ...]
    d_cert: int


def _gen_exponents(count, bits, phi, rng, max_tries):
    exps = []
    top = 1 << (bits - 1)
    for _ in range(max_tries):
        if len(exps) == count:
            break
        e = rng.getrandbits(bits) | top | 1
        if e < 3 or e in exps or not is_probable_prime(e, rng=rng):
            continue
        if gcd(e, phi) != 1:
            continue
        exps.append(e)
    if len(exps) < count:
        raise GenerationError(f"could not find {count} distinct {bits}-bit exponents")
    return exps


def setup(
    k: int = 3,
    modulus_bits: int = 2048,
    exponent_bits: int | None = None,
    challenge_bits: int = DEFAULT_CHALLENGE_BITS,
    rng=None,
    *,
    insecure: bool = False,
    max_tries: int = 64,
) -> tuple[GroupPublicKey, GroupSecretKey]:
    """Generate a fresh group key pair.

    ``exponent_bits`` defaults to ``challenge_bits + 1`` so that every
    public exponent exceeds the challenge space. Passing a smaller value is
    only allowed with ``insecure=True``.
    """
    if rng is None:
        rng = system_rng()
    if exponent_bits is None:
        exponent_bits = challenge_bits + 1
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if modulus_bits < 16:
        raise ParameterError(f"modulus_bits must be >= 16, got {modulus_bits}")
    if exponent_bits < 2:
        raise ParameterError(f"exponent_bits must be >= 2, got {exponent_bits}")
    if not 1 <= challenge_bits <= MAX_CHALLENGE_BITS:
        raise ParameterError(f"challenge_bits must be in [1, {MAX_CHALLENGE_BITS}]")
    if exponent_bits <= challenge_bits and not insecure:
        raise ParameterError(
            "exponent_bits must exceed challenge_bits (pass insecure=True for toy keys)"
        )

    half = (modulus_bits + 1) // 2
    for _ in range(max_tries):
        p = gen_prime(half, rng)
        q = gen_prime(half, rng)
        if p == q:
            continue
        n, phi = p * q, (p - 1) * (q - 1)
        try:
            *exps, cert_exp = _gen_exponents(k + 1, exponent_bits, phi, rng, 200 * exponent_bits)
        except GenerationError:
            continue
        coeffs = [randrange(rng, 0, n)]
        coeffs += [randrange(rng, 1, n) for _ in range(k - 1)]
        coeffs.append(sample_unit(n, rng))
        pk = GroupPublicKey(n, tuple(coeffs), tuple(exps), cert_exp, challenge_bits)
        sk = GroupSecretKey(
            p, q, phi, tuple(mod_inv(e, phi) for e in exps), mod_inv(cert_exp, phi)
        )
        return pk, sk
    raise GenerationError("group setup exceeded its retry budget")


def keypair_from_factors(p, q, coeffs, exps, cert_exp, challenge_bits):
    """Build a key pair from explicit parameters, checking every invariant."""
    if p == q or not (is_probable_prime(p) and is_probable_prime(q)):
        raise ParameterError("p and q must be distinct primes")
    n, phi = p * q, (p - 1) * (q - 1)
    for e in (*exps, cert_exp):
        if gcd(e, phi) != 1:
            raise ParameterError(f"exponent {e} is not coprime to phi(n)")
    pk = GroupPublicKey(n, tuple(coeffs), tuple(exps), cert_exp, challenge_bits)
    sk = GroupSecretKey(
        p, q, phi, tuple(mod_inv(e, phi) for e in exps), mod_inv(cert_exp, phi)
    )
    return pk, sk


def worked_example() -> tuple[GroupPublicKey, GroupSecretKey]:
    """The n = 187 toy group: 3x^3 + 7y^13 + 12z^7 + 19 = 0 (mod 187).

    The z coefficient is 12, the value under which the worked
    tuple (112, 87, 169) actually satisfies the linear relation. Challenges
    are 6 bits against e = 3, so this key is not sound; it exists to
    reproduce the worked numbers.
    """
    return keypair_from_factors(11, 17, (19, 3, 7, 12), (3, 13, 7), 19, 6)


def _check_len(pk, values):
    if len(values) != pk.k:
        raise ParameterError(f"expected {pk.k} values, got {len(values)}")


def linear_check(pk: GroupPublicKey, tuple_) -> bool:
    """a_0 + sum a_j X_j == 0 (mod n)."""
    _check_len(pk, tuple_)
    if any(not 0 <= x < pk.n for x in tuple_):
        raise ParameterError("tuple entries must lie in [0, n)")
    a0, *a = pk.coeffs
    return (a0 + sum(aj * xj for aj, xj in zip(a, tuple_))) % pk.n == 0


def poly_check(pk: GroupPublicKey, secrets) -> bool:
    """a_0 + sum a_j x_j^{e_j} == 0 (mod n)."""
    _check_len(pk, secrets)
    a0, *a = pk.coeffs
    total = a0 + sum(aj * pow(xj, ej, pk.n) for aj, xj, ej in zip(a, secrets, pk.exps))
    return total % pk.n == 0


def power_tuple(pk: GroupPublicKey, secrets) -> tuple[int, ...]:
    _check_len(pk, secrets)
    return tuple(pow(x, e, pk.n) for x, e in zip(secrets, pk.exps))


def solve_last(pk: GroupPublicKey, head) -> int:
    """Return X_k completing ``head`` (X_1..X_{k-1}) to a solution of the linear relation."""
    if len(head) != pk.k - 1:
        raise ParameterError(f"expected {pk.k - 1} leading values")
    a0, *a = pk.coeffs
    partial = a0 + sum(aj * xj for aj, xj in zip(a, head))
    return -partial * mod_inv(a[-1], pk.n) % pk.n


def gm_certify(pk: GroupPublicKey, sk: GroupSecretKey, context: str, payload: bytes) -> int:
    """FDH-RSA signature under the certificate exponent."""
    return pow(hash_to_unit(pk.n, context, payload), sk.d_cert, pk.n)


def gm_check_certificate(pk: GroupPublicKey, context: str, payload: bytes, cert: int) -> bool:
    if not 0 < cert < pk.n:
        return False
    return pow(cert, pk.cert_exp, pk.n) == hash_to_unit(pk.n, context, payload)


PK_FORMAT = "gsspccd-pk-v1"
SK_FORMAT = "gsspccd-sk-v1"


def dump_public_key(pk: GroupPublicKey) -> str:
    return kvfile.dump(PK_FORMAT, [
        ("n", kvfile.fmt_int(pk.n)),
        ("k", kvfile.fmt_int(pk.k)),
        ("coeffs", kvfile.fmt_ints(pk.coeffs)),
        ("exps", kvfile.fmt_ints(pk.exps)),
        ("cert_exp", kvfile.fmt_int(pk.cert_exp)),
        ("challenge_bits", kvfile.fmt_int(pk.challenge_bits)),
    ])


def load_public_key(text: str) -> GroupPublicKey:
    f = kvfile.parse(text, PK_FORMAT, ["n", "k", "coeffs", "exps", "cert_exp", "challenge_bits"])
    exps = kvfile.parse_ints(f["exps"])
    if kvfile.parse_int(f["k"]) != len(exps):
        raise FormatError("k does not match the exponent count")
    try:
        return GroupPublicKey(
            kvfile.parse_int(f["n"]),
            kvfile.parse_ints(f["coeffs"]),
            exps,
            kvfile.parse_int(f["cert_exp"]),
            kvfile.parse_int(f["challenge_bits"]),
        )
    except ParameterError as exc:
        raise FormatError(f"invalid public key: {exc}") from exc


def dump_secret_key(sk: GroupSecretKey) -> str:
    return kvfile.dump(SK_FORMAT, [
        ("p", kvfile.fmt_int(sk.p)),
        ("q", kvfile.fmt_int(sk.q)),
        ("phi", kvfile.fmt_int(sk.phi)),
        ("inv_exps", kvfile.fmt_ints(sk.inv_exps)),
        ("d_cert", kvfile.fmt_int(sk.d_cert)),
    ])


def load_secret_key(text: str) -> GroupSecretKey:
    f = kvfile.parse(text, SK_FORMAT, ["p", "q", "phi", "inv_exps", "d_cert"])
    sk = GroupSecretKey(
        kvfile.parse_int(f["p"]),
        kvfile.parse_int(f["q"]),
        kvfile.parse_int(f["phi"]),
        kvfile.parse_ints(f["inv_exps"]),
        kvfile.parse_int(f["d_cert"]),
    )
    if sk.phi != (sk.p - 1) * (sk.q - 1):
        raise FormatError("phi does not match p and q")
    return sk


def keys_match(pk: GroupPublicKey, sk: GroupSecretKey) -> bool:
    if sk.p * sk.q != pk.n or len(sk.inv_exps) != pk.k:
        return False
    pairs = [*zip(pk.exps, sk.inv_exps), (pk.cert_exp, sk.d_cert)]
    return all(e * d % sk.phi == 1 for e, d in pairs)
