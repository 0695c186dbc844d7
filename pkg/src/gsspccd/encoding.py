"""Canonical byte encodings fed to SHA-256.

Integers are a 4-byte big-endian length followed by the minimal big-endian
magnitude (zero has length 0). Messages carry an 8-byte length prefix.
Every hash input starts with an ASCII tag ``GSSPCCD-v1-<context>``.
"""

import hashlib
from collections.abc import Iterable

from .errors import ParameterError
from .numtheory import is_unit

TAG_PREFIX = b"GSSPCCD-v1-"


def tag(context: str) -> bytes:
    return TAG_PREFIX + context.encode("ascii")


def encode_int(value: int) -> bytes:
    if value < 0:
        raise ParameterError("only non-negative integers are encoded")
    body = value.to_bytes((value.bit_length() + 7) // 8, "big")
    return len(body).to_bytes(4, "big") + body


def encode_ints(values: Iterable[int]) -> bytes:
    return b"".join(encode_int(v) for v in values)


def encode_message(message: bytes) -> bytes:
    return len(message).to_bytes(8, "big") + bytes(message)


def encode_str(text: str) -> bytes:
    raw = text.encode("utf-8")
    return len(raw).to_bytes(4, "big") + raw


def hash_to_unit(n: int, context: str, payload: bytes) -> int:
    """Full-domain hash into the units of Z_n.

    For counter = 0, 1, ... the SHA-256 blocks
    ``H(tag || payload || counter || block_index)`` are concatenated until
    they cover ``n.bit_length() + 64`` bits, reduced mod n, and the first
    unit is returned.
    """
    nblocks = (n.bit_length() + 64 + 255) // 256
    prefix = tag("fdh-" + context) + payload
    counter = 0
    while True:
        stream = b"".join(
            hashlib.sha256(
                prefix + counter.to_bytes(4, "big") + i.to_bytes(4, "big")
            ).digest()
            for i in range(nblocks)
        )
        value = int.from_bytes(stream, "big") % n
        if is_unit(value, n):
            return value
        counter += 1
