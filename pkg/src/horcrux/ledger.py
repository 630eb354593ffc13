"""Append-only identity registry with hash-chained records.

A DID is derived from the content digest of the genesis identity
document, so the identifier itself commits to the enrolled key material.
Each registration appends a :class:`LedgerRecord` whose ``block_digest``
covers every other field and whose ``prev_digest`` points at the record
before it; the genesis record points at 32 zero bytes.

Exports are JSON lines in canonical form (sorted keys, no whitespace).
Import re-serializes every parsed line and requires byte equality with
the original, so even mutations that keep a line well-formed (hex case
flips, reordered keys) are rejected before the chain is checked.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, replace

from .crypto import digest
from .encoding import canonical_bytes, from_hex, to_hex
from .errors import (
    AlreadyRegisteredError,
    ConfigurationError,
    LedgerError,
    NotFoundError,
)

DID_METHOD = "horcrux"
_DID_PREFIX = f"did:{DID_METHOD}:"
_IDENTIFIER_LENGTH = 26
_B32_ALPHABET = frozenset("abcdefghijklmnopqrstuvwxyz234567")
GENESIS_PREV = b"\x00" * 32


@dataclass(frozen=True)
class Did:
    """Decentralized identifier bound to a genesis document digest."""

    identifier: str

    def __post_init__(self) -> None:
        if len(self.identifier) != _IDENTIFIER_LENGTH:
            raise ConfigurationError(
                f"identifier must be {_IDENTIFIER_LENGTH} characters"
            )
        if not set(self.identifier) <= _B32_ALPHABET:
            raise ConfigurationError("identifier must be lowercase base32")

    def __str__(self) -> str:
        return _DID_PREFIX + self.identifier

    @classmethod
    def parse(cls, text: str) -> "Did":
        if not text.startswith(_DID_PREFIX):
            raise ConfigurationError(f"not a {_DID_PREFIX}* identifier: {text!r}")
        return cls(text[len(_DID_PREFIX):])

    @classmethod
    def from_digest(cls, document_digest: bytes) -> "Did":
        if len(document_digest) != 32:
            raise ConfigurationError("document digest must be 32 bytes")
        encoded = base64.b32encode(document_digest[:16]).decode("ascii")
        return cls(encoded.rstrip("=").lower())


_RECORD_FIELDS = (
    "block_digest",
    "did",
    "document_digest",
    "hub_ids",
    "object_key",
    "prev_digest",
    "registered_at",
    "sequence",
)


@dataclass(frozen=True)
class LedgerRecord:
    """One registration: a DID bound to a stored document and its replicas."""

    sequence: int
    prev_digest: bytes
    did: Did
    document_digest: bytes
    object_key: str
    hub_ids: tuple[str, ...]
    registered_at: int
    block_digest: bytes

    def _body(self) -> dict:
        return {
            "did": str(self.did),
            "document_digest": to_hex(self.document_digest),
            "hub_ids": list(self.hub_ids),
            "object_key": self.object_key,
            "prev_digest": to_hex(self.prev_digest),
            "registered_at": self.registered_at,
            "sequence": self.sequence,
        }

    def expected_block_digest(self) -> bytes:
        return digest(canonical_bytes(self._body()))

    def to_wire(self) -> dict:
        wire = self._body()
        wire["block_digest"] = to_hex(self.block_digest)
        return wire

    def to_line(self) -> bytes:
        return canonical_bytes(self.to_wire())

    @classmethod
    def from_wire(cls, obj: dict) -> "LedgerRecord":
        if not isinstance(obj, dict) or tuple(sorted(obj)) != tuple(
            sorted(_RECORD_FIELDS)
        ):
            raise LedgerError("record does not carry exactly the expected fields")
        hub_ids = obj["hub_ids"]
        if not isinstance(hub_ids, list) or not all(
            isinstance(h, str) for h in hub_ids
        ):
            raise LedgerError("hub_ids must be a list of strings")
        sequence = obj["sequence"]
        registered_at = obj["registered_at"]
        if not isinstance(sequence, int) or isinstance(sequence, bool):
            raise LedgerError("sequence must be an integer")
        if not isinstance(registered_at, int) or isinstance(registered_at, bool):
            raise LedgerError("registered_at must be an integer")
        if sequence < 0 or registered_at < 0:
            raise LedgerError("sequence and registration tick must be non-negative")
        if not isinstance(obj["object_key"], str):
            raise LedgerError("object_key must be a string")
        try:
            record = cls(
                sequence=sequence,
                prev_digest=from_hex(obj["prev_digest"]),
                did=Did.parse(obj["did"]),
                document_digest=from_hex(obj["document_digest"]),
                object_key=obj["object_key"],
                hub_ids=tuple(hub_ids),
                registered_at=registered_at,
                block_digest=from_hex(obj["block_digest"]),
            )
        except (ConfigurationError, ValueError, TypeError) as exc:
            raise LedgerError(f"malformed record field: {exc}") from exc
        if len(record.prev_digest) != 32 or len(record.document_digest) != 32:
            raise LedgerError("digests must be 32 bytes")
        if len(record.block_digest) != 32:
            raise LedgerError("block digest must be 32 bytes")
        # object_key is the content address of the stored document: hex of
        # a 32-byte digest.
        try:
            key_bytes = from_hex(record.object_key)
        except ValueError as exc:
            raise LedgerError(f"object_key is not hex: {exc}") from exc
        if len(key_bytes) != 32:
            raise LedgerError("object_key must address a 32-byte digest")
        return record


class Ledger:
    """In-memory chain of registrations with single-writer semantics."""

    def __init__(self) -> None:
        self._records: list[LedgerRecord] = []
        self._by_did: dict[str, LedgerRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[LedgerRecord, ...]:
        return tuple(self._records)

    def register(
        self,
        did: Did,
        document_digest: bytes,
        object_key: str,
        hub_ids: list[str],
        registered_at: int,
    ) -> LedgerRecord:
        if str(did) in self._by_did:
            raise AlreadyRegisteredError(f"{did} is already registered")
        prev = self._records[-1].block_digest if self._records else GENESIS_PREV
        body = LedgerRecord(
            sequence=len(self._records),
            prev_digest=prev,
            did=did,
            document_digest=document_digest,
            object_key=object_key,
            hub_ids=tuple(hub_ids),
            registered_at=registered_at,
            block_digest=b"\x00" * 32,
        )
        record = replace(body, block_digest=body.expected_block_digest())
        self._records.append(record)
        self._by_did[str(did)] = record
        return record

    def resolve(self, did: Did) -> LedgerRecord:
        try:
            return self._by_did[str(did)]
        except KeyError:
            raise NotFoundError(f"{did} is not registered") from None

    def verify_chain(self) -> bool:
        """True iff every record is internally consistent and linked."""
        prev = GENESIS_PREV
        for sequence, record in enumerate(self._records):
            if record.sequence != sequence:
                return False
            if record.prev_digest != prev:
                return False
            if record.block_digest != record.expected_block_digest():
                return False
            prev = record.block_digest
        return True

    def export_bytes(self) -> bytes:
        return b"".join(record.to_line() + b"\n" for record in self._records)

    def export_path(self, path: str) -> None:
        with open(path, "wb") as handle:
            handle.write(self.export_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ledger":
        """Strict import: every line must round-trip to identical bytes."""
        ledger = cls()
        if data == b"":
            return ledger
        if not data.endswith(b"\n"):
            raise LedgerError("export must end with a newline")
        for line in data[:-1].split(b"\n"):
            if line == b"":
                raise LedgerError("export contains an empty line")
            try:
                obj = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise LedgerError(f"record line is not valid JSON: {exc}") from exc
            record = LedgerRecord.from_wire(obj)
            if record.to_line() != line:
                raise LedgerError("record line is not in canonical form")
            if str(record.did) in ledger._by_did:
                raise LedgerError(f"duplicate registration for {record.did}")
            ledger._records.append(record)
            ledger._by_did[str(record.did)] = record
        return ledger

    @classmethod
    def from_path(cls, path: str) -> "Ledger":
        with open(path, "rb") as handle:
            return cls.from_bytes(handle.read())


def verify_export(data: bytes) -> bool:
    """Strict-parse an export and check its chain; any defect is False."""
    try:
        ledger = Ledger.from_bytes(data)
    except LedgerError:
        return False
    return ledger.verify_chain()
