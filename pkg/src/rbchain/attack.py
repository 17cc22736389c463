"""Two-step corruption attack against a weakened link rule.

If blocks were linked by ``P = X**d mod n`` instead of ``X**(d*d + 1)``, one
observed redaction (two pairs ``(X, d)``, ``(X', d')`` with equal link value)
would let anyone mint a third pair through Bezout coefficients of ``d`` and
``d'``. ``two_step_forge`` does exactly that using public values only, and
``strong_scheme_resists`` shows the forged pair fails the real ``d*d + 1``
check.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import modmath
from .errors import NotCoprime
from .keys import PrivateKey, PublicParams


@dataclass(frozen=True)
class WeakCollision:
    x: int
    d: int
    x_alt: int
    d_alt: int
    n: int

    def holds(self) -> bool:
        return pow(self.x, self.d, self.n) == pow(self.x_alt, self.d_alt, self.n)


def _signed_pow(base: int, exponent: int, n: int) -> int:
    # negative exponents go through the inverse; bases are units here
    if exponent < 0:
        return pow(modmath.mod_inverse(base, n), -exponent, n)
    return pow(base, exponent, n)


def make_weak_collision(sk: PrivateKey, pp: PublicParams, seed: bytes | None = None) -> WeakCollision:
    """Build a colliding pair for the weak rule. Needs the trapdoor, which is the point."""
    n, phi = pp.modulus_n, sk.phi
    rng = modmath.make_rng(seed)
    while True:
        y = rng.randrange(2, n - 1)
        if gcd(y, n) == 1:
            break
    while True:
        d = rng.randrange(2, phi)
        d_alt = rng.randrange(2, phi)
        if d != d_alt and gcd(d, phi) == 1 and gcd(d_alt, phi) == 1 and gcd(d, d_alt) == 1:
            break
    x = pow(y, modmath.mod_inverse(d, phi), n)
    x_alt = pow(y, modmath.mod_inverse(d_alt, phi), n)
    return WeakCollision(x, d, x_alt, d_alt, n)


def two_step_forge(wc: WeakCollision) -> tuple[int, int]:
    """Return ``(x_forged, d_forged)`` with ``x_forged**d_forged == x**d (mod n)``."""
    g, a, b = modmath.ext_gcd(wc.d, wc.d_alt)
    if g != 1:
        raise NotCoprime(f"gcd(d, d_alt) = {g}; the attack needs coprime exponents")
    n = wc.n
    x_forged = _signed_pow(wc.x_alt, a, n) * _signed_pow(wc.x, b, n) % n
    return x_forged, wc.d * wc.d_alt


def weak_scheme_forged(wc: WeakCollision) -> bool:
    x_f, d_f = two_step_forge(wc)
    return pow(x_f, d_f, wc.n) == pow(wc.x, wc.d, wc.n)


def strong_scheme_resists(wc: WeakCollision) -> bool:
    x_f, d_f = two_step_forge(wc)
    n = wc.n
    return pow(x_f, d_f * d_f + 1, n) != pow(wc.x, wc.d * wc.d + 1, n)


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    weak_forged: int
    strong_resisted: int


def run_trials(sk: PrivateKey, pp: PublicParams, trials: int, seed: bytes | None = None) -> TrialSummary:
    if seed is None:
        seed = modmath.new_seed()
    forged = resisted = 0
    for i in range(trials):
        wc = make_weak_collision(sk, pp, modmath.derive_seed(seed, "trial", i))
        forged += weak_scheme_forged(wc)
        resisted += strong_scheme_resists(wc)
    return TrialSummary(trials, forged, resisted)
