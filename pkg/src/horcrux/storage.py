"""Identity documents and the replicated stores that hold them.

A :class:`DidDocument` is the genesis record of an enrollment: the
issuer and enrollment public keys, the sealed credential envelope, a
possession commitment, and service endpoints, all signed by the issuer.
Its stored form is canonical JSON and deliberately excludes the DID,
which is derived from the digest of those bytes and attached in memory
after registration.

Hubs are content-addressed blob stores: the object key of every blob is
the hex digest of its bytes, so a fetched document can always be checked
against the address it was fetched from.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .crypto import Envelope, KeyPair, digest, verify_signature
from .encoding import canonical_bytes, from_canonical_bytes, from_hex, to_hex
from .errors import HubWriteError, NotFoundError, StorageError
from .ledger import Did

_DOCUMENT_FIELDS = (
    "auth_credential",
    "enrollment_public",
    "issuer_public",
    "issuer_signature",
    "possession_commitment",
    "service_endpoints",
)


@dataclass(frozen=True)
class ServiceEndpoint:
    role: str
    locator: str

    def to_wire(self) -> dict:
        return {"locator": self.locator, "role": self.role}


@dataclass(frozen=True)
class DidDocument:
    """Genesis identity document, issuer-signed.

    ``did`` is populated after registration and never serialized; the
    identifier is a function of the stored bytes, not part of them.
    """

    issuer_public: bytes
    enrollment_public: bytes
    auth_credential: Envelope
    possession_commitment: bytes
    service_endpoints: tuple[ServiceEndpoint, ...]
    issuer_signature: bytes
    did: Did | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.issuer_public) != 64 or len(self.enrollment_public) != 64:
            raise StorageError("public key material must be 64 bytes")
        if len(self.possession_commitment) != 32:
            raise StorageError("possession commitment must be a 32-byte digest")

    def _presignature_form(self) -> dict:
        return {
            "auth_credential": self.auth_credential.to_wire(),
            "enrollment_public": to_hex(self.enrollment_public),
            "issuer_public": to_hex(self.issuer_public),
            "possession_commitment": to_hex(self.possession_commitment),
            "service_endpoints": [e.to_wire() for e in self.service_endpoints],
        }

    def presignature_bytes(self) -> bytes:
        return canonical_bytes(self._presignature_form())

    def to_wire(self) -> dict:
        wire = self._presignature_form()
        wire["issuer_signature"] = to_hex(self.issuer_signature)
        return wire

    def stored_bytes(self) -> bytes:
        return canonical_bytes(self.to_wire())

    def signature_valid(self) -> bool:
        return verify_signature(
            self.issuer_public, self.presignature_bytes(), self.issuer_signature
        )

    def with_did(self, did: Did) -> "DidDocument":
        return DidDocument(
            issuer_public=self.issuer_public,
            enrollment_public=self.enrollment_public,
            auth_credential=self.auth_credential,
            possession_commitment=self.possession_commitment,
            service_endpoints=self.service_endpoints,
            issuer_signature=self.issuer_signature,
            did=did,
        )

    @classmethod
    def build(
        cls,
        issuer_signing: KeyPair,
        issuer_public: bytes,
        enrollment_public: bytes,
        auth_credential: Envelope,
        possession_commitment: bytes,
        service_endpoints: list[ServiceEndpoint],
    ) -> "DidDocument":
        unsigned = cls(
            issuer_public=issuer_public,
            enrollment_public=enrollment_public,
            auth_credential=auth_credential,
            possession_commitment=possession_commitment,
            service_endpoints=tuple(service_endpoints),
            issuer_signature=b"",
        )
        return cls(
            issuer_public=issuer_public,
            enrollment_public=enrollment_public,
            auth_credential=auth_credential,
            possession_commitment=possession_commitment,
            service_endpoints=tuple(service_endpoints),
            issuer_signature=issuer_signing.sign(unsigned.presignature_bytes()),
        )

    @classmethod
    def from_stored_bytes(cls, data: bytes) -> "DidDocument":
        """Strict parse: the input must be the canonical stored form."""
        try:
            obj = from_canonical_bytes(data)
        except ValueError as exc:
            raise StorageError(f"document is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict) or tuple(sorted(obj)) != tuple(
            sorted(_DOCUMENT_FIELDS)
        ):
            raise StorageError("document does not carry exactly the expected fields")
        endpoints = obj["service_endpoints"]
        if not isinstance(endpoints, list):
            raise StorageError("service_endpoints must be a list")
        try:
            document = cls(
                issuer_public=from_hex(obj["issuer_public"]),
                enrollment_public=from_hex(obj["enrollment_public"]),
                auth_credential=Envelope.from_wire(obj["auth_credential"]),
                possession_commitment=from_hex(obj["possession_commitment"]),
                service_endpoints=tuple(
                    ServiceEndpoint(role=e["role"], locator=e["locator"])
                    for e in endpoints
                ),
                issuer_signature=from_hex(obj["issuer_signature"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StorageError(f"malformed document field: {exc}") from exc
        if document.stored_bytes() != data:
            raise StorageError("document bytes are not in canonical form")
        return document


@dataclass(frozen=True)
class StorageRef:
    """Pointer to one replica of a stored object."""

    hub_id: str
    object_key: str


class Hub:
    """Content-addressed blob store; subclasses supply the byte backend."""

    def __init__(
        self, hub_id: str, capability: str | None = None, failing: bool = False
    ) -> None:
        self.hub_id = hub_id
        self.capability = capability
        self.failing = failing

    def _store(self, object_key: str, data: bytes) -> None:
        raise NotImplementedError

    def _load(self, object_key: str) -> bytes | None:
        raise NotImplementedError

    def _remove(self, object_key: str) -> None:
        raise NotImplementedError

    def put_bytes(self, data: bytes) -> str:
        if self.failing:
            raise HubWriteError(f"hub {self.hub_id} rejected the write")
        object_key = to_hex(digest(data))
        self._store(object_key, data)
        return object_key

    def put_document(self, document: DidDocument) -> StorageRef:
        if not document.signature_valid():
            raise StorageError("refusing to store a document with a bad signature")
        return StorageRef(self.hub_id, self.put_bytes(document.stored_bytes()))

    def get_bytes(self, object_key: str) -> bytes:
        data = self._load(object_key)
        if data is None:
            raise NotFoundError(f"hub {self.hub_id} has no object {object_key}")
        return data

    def get_document(self, object_key: str) -> DidDocument:
        return DidDocument.from_stored_bytes(self.get_bytes(object_key))

    def contains(self, object_key: str) -> bool:
        return self._load(object_key) is not None

    def delete(self, object_key: str) -> None:
        if self._load(object_key) is None:
            raise NotFoundError(f"hub {self.hub_id} has no object {object_key}")
        self._remove(object_key)

    def tamper(self, object_key: str, data: bytes) -> None:
        """Replace stored bytes without rekeying; simulates a corrupt hub."""
        if self._load(object_key) is None:
            raise NotFoundError(f"hub {self.hub_id} has no object {object_key}")
        self._store(object_key, data)


class InMemoryHub(Hub):
    def __init__(
        self, hub_id: str, capability: str | None = None, failing: bool = False
    ) -> None:
        super().__init__(hub_id, capability, failing)
        self._objects: dict[str, bytes] = {}

    def _store(self, object_key: str, data: bytes) -> None:
        self._objects[object_key] = data

    def _load(self, object_key: str) -> bytes | None:
        return self._objects.get(object_key)

    def _remove(self, object_key: str) -> None:
        del self._objects[object_key]


class FileHub(Hub):
    """Hub persisting each object as a file named by its key."""

    def __init__(
        self,
        hub_id: str,
        root: str,
        capability: str | None = None,
        failing: bool = False,
    ) -> None:
        super().__init__(hub_id, capability, failing)
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _path(self, object_key: str) -> str:
        # keys are hex digests, so they are always safe file names
        from_hex(object_key)
        return os.path.join(self.root, object_key)

    def _store(self, object_key: str, data: bytes) -> None:
        with open(self._path(object_key), "wb") as handle:
            handle.write(data)

    def _load(self, object_key: str) -> bytes | None:
        path = self._path(object_key)
        if not os.path.exists(path):
            return None
        with open(path, "rb") as handle:
            return handle.read()

    def _remove(self, object_key: str) -> None:
        os.remove(self._path(object_key))
