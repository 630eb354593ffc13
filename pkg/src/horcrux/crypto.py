"""Key material, challenges, sealed envelopes and MAC helpers.

A :class:`KeyPair` bundles an X25519 key-agreement half with an Ed25519
signing half.  The public form is the 64-byte concatenation of the two
raw public keys; ``key_id`` is its SHA-256 digest.  Private halves never
leave process memory through any wire form.

Envelopes bind their ciphertext to a recipient key and a challenge nonce:
an ephemeral X25519 exchange feeds HKDF-SHA256, the derived key encrypts
with AES-256-GCM, and the nonce plus recipient key id ride as associated
data.  A fresh key per seal makes the all-zero GCM nonce safe.
"""

from __future__ import annotations

import hashlib
import hmac as _hmac
import random
from dataclasses import dataclass, field
from enum import Enum

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .encoding import as_rng, from_b64, from_hex, rand_bytes, to_b64, to_hex
from .errors import (
    ChallengeMismatchError,
    ConfigurationError,
    KeyMismatchError,
    ProtocolError,
    TagVerificationError,
)

NONCE_LENGTH = 16
DEFAULT_CHALLENGE_LIFETIME = 100

_HKDF_INFO = b"horcrux-envelope-v1"
_ZERO_GCM_NONCE = b"\x00" * 12


def digest(data: bytes) -> bytes:
    """The protocol-wide content digest (SHA-256)."""
    return hashlib.sha256(data).digest()


def hmac_tag(key: bytes, message: bytes) -> bytes:
    """Keyed 32-byte authentication tag (HMAC-SHA256)."""
    if not key:
        raise ConfigurationError("hmac key must be non-empty")
    return _hmac.new(key, message, hashlib.sha256).digest()


def hmac_verify(key: bytes, message: bytes, tag: bytes) -> bool:
    return _hmac.compare_digest(hmac_tag(key, message), tag)


class KeyRole(str, Enum):
    RKP = "RKP"  # remote key pair, held by an issuing server
    LKP = "LKP"  # local key pair, held by an enrolled device
    ISSUER_SIGNING = "IssuerSigning"


_SIGNING_ROLES = frozenset({KeyRole.ISSUER_SIGNING, KeyRole.LKP})


@dataclass(frozen=True)
class KeyPair:
    """X25519 + Ed25519 pair under a single identity.

    ``public`` and ``private`` are each 64 bytes: the X25519 half first,
    then the Ed25519 half.
    """

    role: KeyRole
    public: bytes
    private: bytes = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.public) != 64:
            raise ConfigurationError("public key material must be 64 bytes")
        if len(self.private) != 64:
            raise ConfigurationError("private key material must be 64 bytes")

    @property
    def key_id(self) -> bytes:
        return digest(self.public)

    @property
    def exchange_public(self) -> bytes:
        return self.public[:32]

    @property
    def signing_public(self) -> bytes:
        return self.public[32:]

    def sign(self, message: bytes) -> bytes:
        if self.role not in _SIGNING_ROLES:
            raise ProtocolError(f"{self.role.value} keys do not sign")
        signer = Ed25519PrivateKey.from_private_bytes(self.private[32:])
        return signer.sign(message)


def generate_keypair(
    role: KeyRole, rng: int | bytes | str | random.Random
) -> KeyPair:
    """Deterministically derive a pair from the given seed or stream."""
    generator = as_rng(rng)
    exchange_seed = rand_bytes(generator, 32)
    signing_seed = rand_bytes(generator, 32)
    exchange_private = X25519PrivateKey.from_private_bytes(exchange_seed)
    signing_private = Ed25519PrivateKey.from_private_bytes(signing_seed)
    public = (
        exchange_private.public_key().public_bytes_raw()
        + signing_private.public_key().public_bytes_raw()
    )
    return KeyPair(role=role, public=public, private=exchange_seed + signing_seed)


def verify_signature(public: bytes, message: bytes, signature: bytes) -> bool:
    """Check an Ed25519 signature against a 64-byte combined public key.

    Malformed signatures or key material report False rather than raising.
    """
    if len(public) != 64:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(public[32:]).verify(signature, message)
    except (InvalidSignature, ValueError):
        return False
    return True


@dataclass(frozen=True)
class Challenge:
    """Single-use liveness nonce with a logical-clock lifetime."""

    nonce: bytes
    issued_at: int
    expires_after: int = DEFAULT_CHALLENGE_LIFETIME

    def __post_init__(self) -> None:
        if len(self.nonce) != NONCE_LENGTH:
            raise ConfigurationError(f"challenge nonce must be {NONCE_LENGTH} bytes")
        if self.expires_after <= 0:
            raise ConfigurationError("challenge lifetime must be positive")

    def expired(self, now: int) -> bool:
        return now > self.issued_at + self.expires_after


def new_challenge(
    rng: int | bytes | str | random.Random,
    issued_at: int,
    expires_after: int = DEFAULT_CHALLENGE_LIFETIME,
) -> Challenge:
    return Challenge(
        nonce=rand_bytes(as_rng(rng), NONCE_LENGTH),
        issued_at=issued_at,
        expires_after=expires_after,
    )


@dataclass(frozen=True)
class Envelope:
    """Ciphertext sealed to one recipient key, bound to one challenge."""

    recipient_key_id: bytes
    challenge_id: bytes
    ciphertext: bytes  # ephemeral public key (32 bytes) || GCM body
    integrity_tag: bytes

    def to_wire(self) -> dict:
        return {
            "recipient_key_id": to_hex(self.recipient_key_id),
            "challenge_id": to_hex(self.challenge_id),
            "ciphertext": to_b64(self.ciphertext),
            "integrity_tag": to_b64(self.integrity_tag),
        }

    @classmethod
    def from_wire(cls, obj: dict) -> "Envelope":
        return cls(
            recipient_key_id=from_hex(obj["recipient_key_id"]),
            challenge_id=from_hex(obj["challenge_id"]),
            ciphertext=from_b64(obj["ciphertext"]),
            integrity_tag=from_b64(obj["integrity_tag"]),
        )


def _envelope_aad(challenge_nonce: bytes, recipient_key_id: bytes) -> bytes:
    return challenge_nonce + recipient_key_id


def seal_envelope(
    plaintext: bytes,
    recipient_public: bytes,
    challenge: Challenge,
    rng: int | bytes | str | random.Random,
) -> Envelope:
    """Encrypt to the holder of ``recipient_public`` under a challenge."""
    if len(recipient_public) != 64:
        raise ConfigurationError("recipient public key material must be 64 bytes")
    generator = as_rng(rng)
    ephemeral = X25519PrivateKey.from_private_bytes(rand_bytes(generator, 32))
    ephemeral_public = ephemeral.public_key().public_bytes_raw()
    shared = ephemeral.exchange(X25519PublicKey.from_public_bytes(recipient_public[:32]))
    key = HKDF(
        algorithm=SHA256(),
        length=32,
        salt=challenge.nonce,
        info=_HKDF_INFO,
    ).derive(shared)
    recipient_key_id = digest(recipient_public)
    sealed = AESGCM(key).encrypt(
        _ZERO_GCM_NONCE,
        plaintext,
        _envelope_aad(challenge.nonce, recipient_key_id),
    )
    body, tag = sealed[:-16], sealed[-16:]
    return Envelope(
        recipient_key_id=recipient_key_id,
        challenge_id=challenge.nonce,
        ciphertext=ephemeral_public + body,
        integrity_tag=tag,
    )


def open_envelope(
    envelope: Envelope,
    recipient: KeyPair,
    expected_challenge: Challenge | None,
) -> bytes:
    """Decrypt an envelope sealed to ``recipient``.

    ``expected_challenge`` pins the envelope to a live challenge; pass
    None when opening at-rest material whose nonce is already trusted.
    GCM still authenticates the embedded nonce through the AAD either way.
    """
    if envelope.recipient_key_id != recipient.key_id:
        raise KeyMismatchError("envelope is sealed to a different key")
    if (
        expected_challenge is not None
        and envelope.challenge_id != expected_challenge.nonce
    ):
        raise ChallengeMismatchError("envelope bound to a different challenge")
    if len(envelope.ciphertext) < 32:
        raise TagVerificationError("ciphertext too short to carry a key exchange")
    ephemeral_public = envelope.ciphertext[:32]
    body = envelope.ciphertext[32:]
    private = X25519PrivateKey.from_private_bytes(recipient.private[:32])
    shared = private.exchange(X25519PublicKey.from_public_bytes(ephemeral_public))
    key = HKDF(
        algorithm=SHA256(),
        length=32,
        salt=envelope.challenge_id,
        info=_HKDF_INFO,
    ).derive(shared)
    try:
        return AESGCM(key).decrypt(
            _ZERO_GCM_NONCE,
            body + envelope.integrity_tag,
            _envelope_aad(envelope.challenge_id, envelope.recipient_key_id),
        )
    except InvalidTag as exc:
        raise TagVerificationError("envelope failed integrity check") from exc
