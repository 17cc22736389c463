"""Key material, key generation, exponent padding and the redaction inverse."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import gcd
from typing import Optional

from . import modmath
from .errors import PaddingExhausted

DEFAULT_HASH = "sha256"
HASH_ALGORITHMS = ("sha256", "sha384", "sha512", "sha3_256", "sha3_512", "blake2b")
MAX_OFFSET = 64


def hash_bytes(data: bytes, alg: str = DEFAULT_HASH) -> bytes:
    if alg not in HASH_ALGORITHMS:
        raise ValueError(f"unsupported hash algorithm {alg!r}")
    return hashlib.new(alg, data).digest()


@dataclass(frozen=True)
class PublicParams:
    """Everything a verifier needs. ``genesis_prefix`` is filled in by ``init_chain``."""

    modulus_n: int
    hash_alg: str = DEFAULT_HASH
    genesis_prefix: Optional[int] = None

    def __post_init__(self):
        n = self.modulus_n
        if n < 2 or not n & 1:
            raise ValueError("modulus must be an odd integer >= 2")
        if self.hash_alg not in HASH_ALGORITHMS:
            raise ValueError(f"unsupported hash algorithm {self.hash_alg!r}")
        g = self.genesis_prefix
        if g is not None and not (1 <= g < n and gcd(g, n) == 1):
            raise ValueError("genesis prefix must be a unit in [1, n-1]")


@dataclass(frozen=True)
class PrivateKey:
    """The redaction trapdoor: safe primes ``p`` and ``q``."""

    p: int
    q: int

    @property
    def n(self) -> int:
        return self.p * self.q

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)

    def validate(self, rounds: int = modmath.DEFAULT_ROUNDS) -> None:
        if self.p == self.q:
            raise ValueError("p and q must be distinct")
        for name, v in (("p", self.p), ("q", self.q)):
            if not modmath.is_safe_prime(v, rounds):
                raise ValueError(f"{name} = {v} is not a safe prime")

    def matches(self, pp: PublicParams) -> bool:
        return self.n == pp.modulus_n


@dataclass(frozen=True)
class PaddedExponent:
    d_raw: int
    offset: int

    @property
    def d(self) -> int:
        return self.d_raw + self.offset

    @property
    def link_exponent(self) -> int:
        return self.d * self.d + 1


def keygen(
    bits_per_prime: int, seed: bytes | None = None, hash_alg: str = DEFAULT_HASH
) -> tuple[PublicParams, PrivateKey]:
    if bits_per_prime < 4:
        raise ValueError("bits_per_prime must be >= 4")
    if bits_per_prime < 6:
        # 4 and 5 bits each hold a single safe prime (11 and 23)
        raise ValueError("distinct safe primes need bits_per_prime >= 6")
    if seed is None:
        seed = modmath.new_seed()
    p = modmath.gen_safe_prime(bits_per_prime, modmath.derive_seed(seed, "p"))
    attempt = 0
    while True:
        q = modmath.gen_safe_prime(bits_per_prime, modmath.derive_seed(seed, "q", attempt))
        if q != p:
            break
        attempt += 1
    sk = PrivateKey(p, q)
    return PublicParams(sk.n, hash_alg), sk


def _offsets(bound: int):
    yield 0
    for k in range(1, bound + 1):
        yield k
        yield -k


def pad_exponent(d_raw: int, sk: PrivateKey, bound: int = MAX_OFFSET) -> PaddedExponent:
    """Smallest offset (0, +1, -1, +2, -2, ...) making ``d**2 + 1`` a unit mod phi.

    Offsets yielding ``d < 2`` are skipped: exponents 1 and 2 would be
    trivially invertible by anyone.
    """
    phi = sk.phi
    for offset in _offsets(bound):
        d = d_raw + offset
        if d >= 2 and gcd(d * d + 1, phi) == 1:
            return PaddedExponent(d_raw, offset)
    raise PaddingExhausted(f"no offset within +/-{bound} pads {d_raw}")


def redaction_exponent(pe: PaddedExponent, sk: PrivateKey) -> int:
    return modmath.mod_inverse(pe.link_exponent, sk.phi)
