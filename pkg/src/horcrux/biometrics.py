"""Synthetic biometric templates and their matcher.

Templates are fixed-length bit vectors (iris-code style) compared by
fractional Hamming distance.  A reference template is captured once at
enrollment; later captures of the same trait are modeled as independent
per-bit flips, while impostor captures are fresh uniform vectors.  With
the default length 512 and threshold 0.32, genuine captures at flip
probability 0.1 and impostor captures separate so sharply that desk-scale
false accept/reject rates are effectively zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .encoding import as_rng, rand_bytes, to_hex
from .errors import ConfigurationError, ProtocolError

DEFAULT_LENGTH = 512
DEFAULT_THRESHOLD = 0.32
DEFAULT_GENUINE_FLIP_PROB = 0.1


@dataclass(frozen=True)
class BiometricVector:
    """A bit vector of fixed length, stored big-endian (MSB of byte 0 is bit 0)."""

    bits: bytes
    length: int

    def __post_init__(self) -> None:
        if self.length <= 0 or self.length % 8 != 0:
            raise ConfigurationError(
                f"vector length must be a positive multiple of 8, got {self.length}"
            )
        if len(self.bits) != self.length // 8:
            raise ConfigurationError(
                f"expected {self.length // 8} bytes for length {self.length}, "
                f"got {len(self.bits)}"
            )

    @classmethod
    def from_bytes(cls, data: bytes) -> "BiometricVector":
        return cls(bits=data, length=8 * len(data))

    def to_hex(self) -> str:
        return to_hex(self.bits)

    def __int__(self) -> int:
        return int.from_bytes(self.bits, "big")


@dataclass(frozen=True)
class MatchResult:
    """Outcome of one comparison; accepted iff distance <= threshold."""

    distance: float
    threshold: float
    accepted: bool


def generate_ibv(
    seed: int | bytes | str | random.Random, length: int = DEFAULT_LENGTH
) -> BiometricVector:
    """Generate a uniformly random reference template, reproducible from seed."""
    if length <= 0 or length % 8 != 0:
        raise ConfigurationError(
            f"vector length must be a positive multiple of 8, got {length}"
        )
    rng = as_rng(seed)
    return BiometricVector(bits=rand_bytes(rng, length // 8), length=length)


def derive_cbv(
    ibv: BiometricVector,
    flip_prob: float,
    seed: int | bytes | str | random.Random,
) -> BiometricVector:
    """Model a fresh capture of the same trait.

    Each bit of the reference is flipped independently with ``flip_prob``,
    reproducibly from ``seed``.  flip_prob 0 returns the reference
    unchanged; flip_prob 1 returns its bitwise complement.
    """
    if not 0.0 <= flip_prob <= 1.0:
        raise ConfigurationError(f"flip probability must be in [0, 1], got {flip_prob}")
    if flip_prob == 0.0:
        return ibv
    mask_bits = 0
    if flip_prob == 1.0:
        mask_bits = (1 << ibv.length) - 1
    else:
        rng = as_rng(seed)
        for _ in range(ibv.length):
            mask_bits = (mask_bits << 1) | (1 if rng.random() < flip_prob else 0)
    flipped = int(ibv) ^ mask_bits
    return BiometricVector(
        bits=flipped.to_bytes(ibv.length // 8, "big"), length=ibv.length
    )


def match_vectors(
    reference: BiometricVector,
    candidate: BiometricVector,
    threshold: float = DEFAULT_THRESHOLD,
) -> MatchResult:
    """Compare two templates by fractional Hamming distance.

    Operates on transient values only; neither input is persisted.
    """
    if reference.length != candidate.length:
        raise ProtocolError(
            f"cannot match vectors of lengths {reference.length} and {candidate.length}"
        )
    if not 0.0 <= threshold <= 1.0:
        raise ConfigurationError(f"threshold must be in [0, 1], got {threshold}")
    differing = int(reference) ^ int(candidate)
    distance = differing.bit_count() / reference.length
    return MatchResult(
        distance=distance, threshold=threshold, accepted=distance <= threshold
    )
