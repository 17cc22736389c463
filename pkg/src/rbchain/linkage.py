"""The public side of the scheme: block encoding, hash-to-exponent, link and checks.

A block with prefix ``P``, content ``C`` and suffix ``X`` emits the next
prefix ``X ** (d*d + 1) mod n`` where ``d`` is the hash of ``(P, C)`` read
as a big-endian integer, reduced mod ``n``, plus the block's public padding
offset.
"""

from __future__ import annotations

from math import gcd

from . import modmath
from .errors import InvalidSuffix, OversizeInput
from .keys import MAX_OFFSET, PublicParams, hash_bytes

_MAX_FIELD = 2**32 - 1


def int_to_bytes(value: int) -> bytes:
    """Minimal big-endian encoding; zero encodes as a single ``00`` byte."""
    if value < 0:
        raise ValueError("negative integers have no encoding")
    return value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")


def encode_link_input(prefix: int, content: bytes) -> bytes:
    pb = int_to_bytes(prefix)
    if len(content) > _MAX_FIELD:
        raise OversizeInput("content exceeds 2**32 - 1 bytes")
    return len(pb).to_bytes(4, "big") + pb + len(content).to_bytes(4, "big") + bytes(content)


def hash_to_exponent(prefix: int, content: bytes, pp: PublicParams) -> int:
    digest = hash_bytes(encode_link_input(prefix, content), pp.hash_alg)
    return int.from_bytes(digest, "big") % pp.modulus_n


def is_valid_suffix(x: int, n: int) -> bool:
    return 1 <= x < n and x * x % n != 1 and gcd(x, n) == 1


def check_suffix(x: int, n: int) -> int:
    if not is_valid_suffix(x, n):
        raise InvalidSuffix(f"{x} is not a valid suffix modulo {n}")
    return x


def link(x: int, d: int, pp: PublicParams) -> int:
    n = pp.modulus_n
    check_suffix(x, n)
    return modmath.mod_exp(x, d * d + 1, n)


def sample_suffix(pp: PublicParams, seed: bytes | None = None) -> int:
    """Uniform unit of Z_n other than the square roots of 1, by rejection."""
    n = pp.modulus_n
    if n < 6:
        raise ValueError("modulus too small to sample a suffix")
    rng = modmath.make_rng(seed)
    while True:
        x = rng.randrange(1, n)
        if is_valid_suffix(x, n):
            return x


def verify_link(
    prefix: int, content: bytes, offset: int, x: int, expected_next_prefix: int, pp: PublicParams
) -> bool:
    """True iff the block ``(prefix, content, x, offset)`` emits ``expected_next_prefix``."""
    n = pp.modulus_n
    if not isinstance(offset, int) or abs(offset) > MAX_OFFSET:
        return False
    if not (0 <= prefix < n) or not is_valid_suffix(x, n):
        return False
    d = hash_to_exponent(prefix, content, pp) + offset
    if d < 2:
        return False
    return modmath.mod_exp(x, d * d + 1, n) == expected_next_prefix
