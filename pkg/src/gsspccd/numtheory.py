"""Exact modular arithmetic and prime generation on Python integers."""

from math import gcd

from .errors import GenerationError, NotInvertibleError, ParameterError
from .rng import randrange, system_rng

SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
    233, 239, 241, 251,
)

# Bases 2..17 decide every n below this bound exactly.
_DETERMINISTIC_BOUND = 341_550_071_728_321
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17)

DEFAULT_ROUNDS = 40


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    if modulus < 2:
        raise ParameterError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        return pow(mod_inv(base, modulus), -exponent, modulus)
    return pow(base, exponent, modulus)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``g = gcd(a, b)`` and ``u*a + v*b = g``."""
    if a == 0 and b == 0:
        raise ParameterError("egcd(0, 0) is undefined")
    u0, u1, v0, v1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        a, u0, v0 = -a, -u0, -v0
    return a, u0, v0


def mod_inv(a: int, modulus: int) -> int:
    if modulus < 2:
        raise ParameterError(f"modulus must be >= 2, got {modulus}")
    g, u, _ = egcd(a % modulus, modulus)
    if g != 1:
        raise NotInvertibleError(a, modulus, g)
    return u % modulus


def _mr_witness(n: int, d: int, s: int, a: int) -> bool:
    """True when ``a`` proves ``n`` composite."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_probable_prime(n: int, rounds: int = DEFAULT_ROUNDS, rng=None) -> bool:
    """Miller-Rabin test; exact below ~3.4e14, error <= 4**-rounds above."""
    if rounds < 1:
        raise ParameterError("rounds must be >= 1")
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _DETERMINISTIC_BOUND:
        return not any(_mr_witness(n, d, s, a) for a in _DETERMINISTIC_BASES)
    rng = rng or system_rng()
    for _ in range(rounds):
        if _mr_witness(n, d, s, randrange(rng, 2, n - 1)):
            return False
    return True


def gen_prime(bits: int, rng, max_tries: int | None = None) -> int:
    """Random prime with exactly ``bits`` bits (top bit set)."""
    if bits < 4:
        raise ParameterError(f"bits must be >= 4, got {bits}")
    if max_tries is None:
        max_tries = 100 * bits
    top = 1 << (bits - 1)
    for _ in range(max_tries):
        candidate = rng.getrandbits(bits) | top | 1
        if is_probable_prime(candidate, DEFAULT_ROUNDS, rng):
            return candidate
    raise GenerationError(f"no {bits}-bit prime found in {max_tries} tries")


def gen_safe_prime(bits: int, rng, max_tries: int | None = None) -> tuple[int, int]:
    """Return ``(P, Q)`` with ``P = 2Q + 1``, both prime, ``P`` of ``bits`` bits."""
    if bits < 4:
        raise ParameterError(f"bits must be >= 4, got {bits}")
    if max_tries is None:
        max_tries = 2000 * bits
    top = 1 << (bits - 2)
    for _ in range(max_tries):
        q = rng.getrandbits(bits - 1) | top | 1
        p = 2 * q + 1
        # cheap sieve on both before Miller-Rabin
        if any(q % s == 0 and q != s or p % s == 0 and p != s for s in SMALL_PRIMES):
            continue
        if is_probable_prime(q, DEFAULT_ROUNDS, rng) and is_probable_prime(p, DEFAULT_ROUNDS, rng):
            return p, q
    raise GenerationError(f"no {bits}-bit safe prime found in {max_tries} tries")


def sample_unit(modulus: int, rng) -> int:
    """Uniform element of the unit group of Z_modulus, by rejection."""
    if modulus < 2:
        raise ParameterError(f"modulus must be >= 2, got {modulus}")
    while True:
        x = randrange(rng, 1, modulus)
        if gcd(x, modulus) == 1:
            return x


def is_unit(x: int, modulus: int) -> bool:
    return 0 < x < modulus and gcd(x, modulus) == 1
