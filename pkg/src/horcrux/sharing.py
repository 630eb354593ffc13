"""Secret sharing of biometric templates.

Two schemes:

* ``Xor2of2``: one-time-pad splitting into exactly two shares.  Either
  share alone is uniformly random; XOR of both recovers the template.
* ``Shamir``: k-of-n sharing with byte-wise polynomials over GF(2^8)
  (reduction polynomial x^8 + x^4 + x^3 + x + 1, i.e. 0x11B).  Share i
  holds the polynomial evaluations at x = i; the secret sits at x = 0.

Shares carry their scheme, threshold and index so a combiner can reject
mixed or incomplete sets instead of silently producing garbage.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .biometrics import BiometricVector
from .encoding import as_rng, from_hex, rand_bytes, to_hex
from .errors import ConfigurationError, ReconstructionError

REDUCTION_POLY = 0x11B
_GENERATOR = 0x03

# exp/log tables for the multiplicative group generated by 0x03.
_EXP = [0] * 512
_LOG = [0] * 256


def _build_tables() -> None:
    value = 1
    for power in range(255):
        _EXP[power] = value
        _LOG[value] = power
        value <<= 1
        if value & 0x100:
            value ^= REDUCTION_POLY
        value ^= _EXP[power]  # multiply by 0x03 = shift (x2) then add original
    for power in range(255, 512):
        _EXP[power] = _EXP[power - 255]


_build_tables()


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^8)")
    return _EXP[255 - _LOG[a]]


def _poly_eval(coefficients: list[int], x: int) -> int:
    # Horner's rule, highest-degree coefficient first.
    result = 0
    for coefficient in reversed(coefficients):
        result = gf_mul(result, x) ^ coefficient
    return result


class Scheme(str, Enum):
    XOR_2OF2 = "Xor2of2"
    SHAMIR = "Shamir"


@dataclass(frozen=True)
class Share:
    """One fragment of a split template."""

    scheme: Scheme
    index: int
    payload: bytes
    k: int
    n: int

    def __post_init__(self) -> None:
        if self.scheme is Scheme.XOR_2OF2:
            if (self.k, self.n) != (2, 2):
                raise ConfigurationError("XOR shares are always 2-of-2")
            if self.index not in (1, 2):
                raise ConfigurationError("XOR share index must be 1 or 2")
        else:
            if not 2 <= self.k <= self.n <= 255:
                raise ConfigurationError(
                    f"need 2 <= k <= n <= 255, got k={self.k} n={self.n}"
                )
            if not 1 <= self.index <= self.n:
                raise ConfigurationError(
                    f"share index must be in 1..{self.n}, got {self.index}"
                )

    def to_wire(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "index": self.index,
            "k": self.k,
            "n": self.n,
            "payload": to_hex(self.payload),
        }

    @classmethod
    def from_wire(cls, obj: dict) -> "Share":
        return cls(
            scheme=Scheme(obj["scheme"]),
            index=int(obj["index"]),
            k=int(obj["k"]),
            n=int(obj["n"]),
            payload=from_hex(obj["payload"]),
        )


def split_xor(
    ibv: BiometricVector, rng: int | bytes | str | random.Random
) -> tuple[Share, Share]:
    """Split into two one-time-pad shares: share2 is the pad, share1 = ibv XOR pad."""
    generator = as_rng(rng)
    pad = rand_bytes(generator, len(ibv.bits))
    masked = bytes(a ^ b for a, b in zip(ibv.bits, pad))
    return (
        Share(scheme=Scheme.XOR_2OF2, index=1, payload=masked, k=2, n=2),
        Share(scheme=Scheme.XOR_2OF2, index=2, payload=pad, k=2, n=2),
    )


def combine_xor(s1: Share, s2: Share) -> BiometricVector:
    if s1.scheme is not Scheme.XOR_2OF2 or s2.scheme is not Scheme.XOR_2OF2:
        raise ReconstructionError("combine_xor requires two Xor2of2 shares")
    if s1.index == s2.index:
        raise ReconstructionError("XOR reconstruction needs two distinct shares")
    if len(s1.payload) != len(s2.payload):
        raise ReconstructionError("XOR shares have mismatched payload lengths")
    recovered = bytes(a ^ b for a, b in zip(s1.payload, s2.payload))
    return BiometricVector.from_bytes(recovered)


def split_shamir(
    ibv: BiometricVector, k: int, n: int, rng: int | bytes | str | random.Random
) -> list[Share]:
    """Split into n shares, any k of which reconstruct the template.

    Per byte position a degree-(k-1) polynomial is drawn with the secret
    byte as constant term and uniform random higher coefficients; share i
    receives the evaluations at x = i.
    """
    if not 2 <= k <= n <= 255:
        raise ConfigurationError(f"need 2 <= k <= n <= 255, got k={k} n={n}")
    generator = as_rng(rng)
    payloads = [bytearray(len(ibv.bits)) for _ in range(n)]
    for position, secret_byte in enumerate(ibv.bits):
        coefficients = [secret_byte] + list(rand_bytes(generator, k - 1))
        for index in range(1, n + 1):
            payloads[index - 1][position] = _poly_eval(coefficients, index)
    return [
        Share(scheme=Scheme.SHAMIR, index=i + 1, payload=bytes(payloads[i]), k=k, n=n)
        for i in range(n)
    ]


def combine_shamir(shares: list[Share]) -> BiometricVector:
    """Reconstruct by Lagrange interpolation at x = 0 over GF(2^8)."""
    if not shares:
        raise ReconstructionError("no shares supplied")
    head = shares[0]
    if head.scheme is not Scheme.SHAMIR:
        raise ReconstructionError("combine_shamir requires Shamir shares")
    for share in shares:
        if (share.scheme, share.k, share.n) != (head.scheme, head.k, head.n):
            raise ReconstructionError("shares disagree on scheme metadata")
        if len(share.payload) != len(head.payload):
            raise ReconstructionError("shares have mismatched payload lengths")
    indices = [share.index for share in shares]
    if len(set(indices)) != len(indices):
        raise ReconstructionError("duplicate share indices")
    if len(shares) < head.k:
        raise ReconstructionError(
            f"need at least {head.k} shares, got {len(shares)}"
        )

    # Lagrange basis at x = 0 depends only on the index set, not the byte
    # position, so compute each coefficient once.
    basis = []
    for share in shares:
        numerator, denominator = 1, 1
        for other in shares:
            if other.index == share.index:
                continue
            numerator = gf_mul(numerator, other.index)
            denominator = gf_mul(denominator, share.index ^ other.index)
        basis.append(gf_mul(numerator, gf_inv(denominator)))

    length = len(head.payload)
    secret = bytearray(length)
    for position in range(length):
        value = 0
        for coefficient, share in zip(basis, shares):
            value ^= gf_mul(coefficient, share.payload[position])
        secret[position] = value
    return BiometricVector.from_bytes(bytes(secret))


def combine(shares: list[Share]) -> BiometricVector:
    """Scheme-dispatching reconstruction."""
    if not shares:
        raise ReconstructionError("no shares supplied")
    if shares[0].scheme is Scheme.XOR_2OF2:
        if len(shares) != 2:
            raise ReconstructionError("XOR reconstruction needs exactly two shares")
        return combine_xor(shares[0], shares[1])
    return combine_shamir(shares)
