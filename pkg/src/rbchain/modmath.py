"""Modular arithmetic, primality testing and safe-prime generation.

Integers are plain Python ``int`` values. Nothing here is constant-time; the
package is a protocol demonstrator, not hardened cryptography.
"""

from __future__ import annotations

import hashlib
import os
import random
from math import isqrt

from .errors import InvalidModulus, NotInvertible, UndefinedGcd

SEED_BYTES = 32
DEFAULT_ROUNDS = 64

_SIEVE_LIMIT = 1 << 16
_WINDOW = 4096


def _primes_below(limit):
    flags = bytearray(b"\x01") * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit - 1) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit, i)))
    return [i for i, f in enumerate(flags) if f]


SMALL_PRIMES = _primes_below(_SIEVE_LIMIT)
_SMALL_PRIME_SET = frozenset(SMALL_PRIMES)
_TRIAL_PRIMES = SMALL_PRIMES[:64]


# -- randomness -------------------------------------------------------------


def new_seed() -> bytes:
    """Fresh 32-byte seed from system entropy."""
    return os.urandom(SEED_BYTES)


def check_seed(seed: bytes) -> bytes:
    if not isinstance(seed, (bytes, bytearray)) or len(seed) != SEED_BYTES:
        raise ValueError(f"seed must be exactly {SEED_BYTES} bytes")
    return bytes(seed)


def make_rng(seed: bytes | None) -> random.Random:
    """Deterministic generator for ``seed``; ``None`` draws a fresh seed."""
    if seed is None:
        seed = new_seed()
    return random.Random(check_seed(seed))


def derive_seed(seed: bytes, *labels) -> bytes:
    """Child seed bound to ``seed`` and a sequence of labels (str, int or bytes)."""
    h = hashlib.sha256(check_seed(seed))
    for label in labels:
        if isinstance(label, int):
            label = str(label)
        if isinstance(label, str):
            label = label.encode()
        h.update(len(label).to_bytes(4, "big"))
        h.update(label)
    return h.digest()


def seed_from_text(text: str) -> bytes:
    """Convenience seed for tests and demos: SHA-256 of ``text``."""
    return hashlib.sha256(text.encode()).digest()


# -- arithmetic -------------------------------------------------------------


def mod_exp(base: int, exponent: int, modulus: int) -> int:
    if modulus < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    return pow(base, exponent, modulus)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b)`` and ``a*x + b*y == g``."""
    if a == 0 and b == 0:
        raise UndefinedGcd("gcd(0, 0) is undefined")
    r0, r1 = a, b
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def mod_inverse(a: int, m: int) -> int:
    if m < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {m}")
    g, x, _ = ext_gcd(a % m, m)
    if g != 1:
        raise NotInvertible(f"{a} is not invertible modulo {m} (gcd {g})")
    return x % m


# -- primality --------------------------------------------------------------


def is_probable_prime(candidate: int, rounds: int = DEFAULT_ROUNDS) -> bool:
    """Miller-Rabin. ``False`` is certain; ``True`` errs with probability <= 4**-rounds.

    Witnesses come from a generator seeded by the candidate itself, so the
    answer for a given input never changes between calls.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n = candidate
    if n < 2:
        return False
    if n < _SIEVE_LIMIT:
        return n in _SMALL_PRIME_SET
    for p in _TRIAL_PRIMES:
        if n % p == 0:
            return False

    s, t = 0, n - 1
    while not t & 1:
        s += 1
        t >>= 1

    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, t, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_safe_prime(candidate: int, rounds: int = DEFAULT_ROUNDS) -> bool:
    if candidate < 5 or not candidate & 1:
        return False
    return is_probable_prime((candidate - 1) // 2, rounds) and is_probable_prime(
        candidate, rounds
    )


def gen_safe_prime(bits: int, seed: bytes | None = None, rounds: int = DEFAULT_ROUNDS) -> int:
    """Random safe prime of exactly ``bits`` bits, deterministic in ``seed``.

    Candidates are walked in windows of ``c0 + 4k`` (every safe prime above 7
    is 3 mod 4). Each window is sieved so that neither ``c`` nor ``(c-1)/2``
    has a small factor, survivors get a base-2 Fermat screen on ``r`` then
    ``c``, and only then the full Miller-Rabin check. An exhausted window
    triggers a fresh random start.
    """
    if bits < 4:
        raise ValueError("bits must be >= 4")
    rng = make_rng(seed)
    top = 1 << bits
    while True:
        c0 = rng.getrandbits(bits) | (1 << (bits - 1)) | 3
        width = min(_WINDOW, (top - 1 - c0) // 4 + 1)
        alive = bytearray(b"\x01") * width
        for p in SMALL_PRIMES[1:]:
            # only primes where divisibility proves compositeness for c >= c0
            if 2 * p + 1 >= c0:
                break
            inv4 = pow(4, -1, p)
            for residue in (0, 1):  # c = 0 (c composite) or c = 1 (r composite)
                k0 = (residue - c0) * inv4 % p
                alive[k0::p] = bytes(len(range(k0, width, p)))
        for k in range(width):
            if not alive[k]:
                continue
            c = c0 + 4 * k
            r = c >> 1
            if r > 3 and pow(2, r - 1, r) != 1:
                continue
            if pow(2, c - 1, c) != 1:
                continue
            if is_safe_prime(c, rounds):
                return c
