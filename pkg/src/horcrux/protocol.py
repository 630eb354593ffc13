"""Enrollment and authentication flows.

Actors hold long-lived key material in :class:`ClientState` (a device
with a local key pair and its retained share) and :class:`ServerState`
(an issuer or verifier with an exchange pair, a signing pair, a
challenge table, and the credential keys its deployment trusts it
with).  Flows exchange :class:`ProtocolMessage` values through a
channel object so a harness can log, delay, or tamper with traffic;
the :class:`DirectChannel` here just counts ticks.

Three flows are implemented:

* ``enroll``: the device splits its reference template, keeps share 1,
  and sends the rest to the issuer sealed in transit.  The issuer
  re-seals them as the at-rest credential, signs an identity document,
  replicates it to hubs, and registers the derived DID on the ledger.
  Hub writes happen before the ledger write; on any failure the
  already-written replicas are deleted so no orphaned state survives.
* ``authenticate_remote``: the verifier reconstructs the reference
  template from the credential shares (plus the device share, unless
  the policy keeps it offline) and matches the candidate server-side.
* ``authenticate_local``: the verifier re-seals the credential shares
  to the device, which reconstructs and matches on-device, then proves
  possession with a keyed tag.  With ``mitigation`` off the tag key is
  the public possession commitment, which an adversary can look up;
  ``spoof_local_proof`` reproduces exactly that forgery.  With
  ``mitigation`` on the key is derived from a signature only the
  enrolled device can produce.

Reconstructed templates and candidate captures are wiped (best effort:
references dropped) as soon as the match decision is made; plaintext
shares never outlive the step that sealed them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .biometrics import DEFAULT_THRESHOLD, BiometricVector, match_vectors
from .crypto import (
    DEFAULT_CHALLENGE_LIFETIME,
    Challenge,
    Envelope,
    KeyPair,
    KeyRole,
    digest,
    generate_keypair,
    hmac_tag,
    hmac_verify,
    new_challenge,
    open_envelope,
    seal_envelope,
    verify_signature,
)
from .encoding import (
    as_rng,
    canonical_bytes,
    from_canonical_bytes,
    from_hex,
    rand_bytes,
    to_hex,
)
from .errors import (
    ChallengeError,
    ChallengeMismatchError,
    ConfigurationError,
    KeyMismatchError,
    NotFoundError,
    ProtocolError,
    StorageError,
    TagVerificationError,
)
from .ledger import Did, Ledger, LedgerRecord
from .sharing import Scheme, Share, combine, split_shamir, split_xor
from .storage import DidDocument, Hub, ServiceEndpoint, StorageRef

SESSION_ID_LENGTH = 16
CHALLENGE_GC_GRACE = 10


class MessageKind(str, Enum):
    ENROLL_REQUEST = "EnrollRequest"
    ENROLL_SHARE = "EnrollShare"
    ENROLL_RESULT = "EnrollResult"
    AUTH_REQUEST = "AuthRequest"
    CHALLENGE_GRANT = "ChallengeGrant"
    CLAIM_PRESENT = "ClaimPresent"
    SHARE_AND_CBV = "ShareAndCbv"
    REMOTE_SHARE_DELIVERY = "RemoteShareDelivery"
    HMAC_PROOF = "HmacProof"
    AUTH_RESULT = "AuthResult"
    ERROR = "Error"


@dataclass(frozen=True)
class ProtocolMessage:
    """One wire message; bodies hold only JSON-safe values."""

    kind: MessageKind
    session_id: bytes
    sender: str
    body: dict

    def __post_init__(self) -> None:
        if len(self.session_id) != SESSION_ID_LENGTH:
            raise ProtocolError(f"session id must be {SESSION_ID_LENGTH} bytes")

    def to_wire(self) -> dict:
        return {
            "body": self.body,
            "kind": self.kind.value,
            "sender": self.sender,
            "session_id": to_hex(self.session_id),
        }


class AuthMode(str, Enum):
    REMOTE = "Remote"
    LOCAL = "Local"


class FailureReason(str, Enum):
    BIOMETRIC_MISMATCH = "BiometricMismatch"
    TAMPER_DETECTED = "TamperDetected"
    UNKNOWN_ISSUER = "UnknownIssuer"
    KEY_MISMATCH = "KeyMismatch"
    REPLAY = "Replay"
    CHALLENGE_EXPIRED = "ChallengeExpired"
    SPOOF_DETECTED = "SpoofDetected"


@dataclass(frozen=True)
class AuthOutcome:
    accepted: bool
    mode: AuthMode
    failure_reason: FailureReason | None = None

    def __post_init__(self) -> None:
        if self.accepted and self.failure_reason is not None:
            raise ProtocolError("accepted outcomes carry no failure reason")
        if not self.accepted and self.failure_reason is None:
            raise ProtocolError("rejected outcomes must carry a failure reason")

    def to_wire(self) -> dict:
        wire: dict = {"accepted": self.accepted, "mode": self.mode.value}
        if self.failure_reason is not None:
            wire["failure_reason"] = self.failure_reason.value
        return wire


class DirectChannel:
    """Loss-free in-process delivery; one logical tick per send."""

    def __init__(self) -> None:
        self.now = 0

    def send(
        self, sender: str, receiver: str, message: ProtocolMessage
    ) -> ProtocolMessage:
        self.now += 1
        return message


@dataclass
class ClientState:
    """An enrolled (or enrolling) device."""

    name: str
    lkp: KeyPair
    did: Did | None = None
    local_share: Share | None = None
    issuer_public: bytes | None = None


@dataclass
class ServerState:
    """An issuing or verifying server.

    ``credential_keys`` maps key ids to private pairs this server may
    open at-rest credentials with; which pairs it holds is a deployment
    trust decision, not a protocol one.  ``consumed_nonces`` is never
    garbage collected: a consumed challenge must stay rejectable
    forever, while the live table is pruned shortly after expiry.
    """

    name: str
    rkp: KeyPair
    signing: KeyPair
    credential_keys: dict[str, KeyPair] = field(default_factory=dict)
    known_issuers: set[str] = field(default_factory=set)
    challenge_table: dict[str, Challenge] = field(default_factory=dict)
    consumed_nonces: set[str] = field(default_factory=set)

    def trust_issuer(self, issuer_signing_public: bytes) -> None:
        self.known_issuers.add(to_hex(issuer_signing_public))

    def hold_credential_key(self, pair: KeyPair) -> None:
        self.credential_keys[to_hex(pair.key_id)] = pair


def make_client(name: str, rng: int | bytes | str | random.Random) -> ClientState:
    return ClientState(name=name, lkp=generate_keypair(KeyRole.LKP, rng))


def make_server(name: str, rng: int | bytes | str | random.Random) -> ServerState:
    generator = as_rng(rng)
    return ServerState(
        name=name,
        rkp=generate_keypair(KeyRole.RKP, generator),
        signing=generate_keypair(KeyRole.ISSUER_SIGNING, generator),
    )


def issue_challenge(
    server: ServerState,
    rng: random.Random,
    now: int,
    lifetime: int = DEFAULT_CHALLENGE_LIFETIME,
) -> Challenge:
    challenge = new_challenge(rng, issued_at=now, expires_after=lifetime)
    nonce_hex = to_hex(challenge.nonce)
    if nonce_hex in server.challenge_table or nonce_hex in server.consumed_nonces:
        raise ChallengeError("nonce collision; refusing to reissue")
    server.challenge_table[nonce_hex] = challenge
    return challenge


def consume_challenge(
    server: ServerState, nonce_hex: str, now: int
) -> tuple[Challenge | None, FailureReason | None]:
    """Single-use check: a nonce is honored once, within its lifetime."""
    if nonce_hex in server.consumed_nonces:
        return None, FailureReason.REPLAY
    challenge = server.challenge_table.get(nonce_hex)
    if challenge is None or challenge.expired(now):
        return None, FailureReason.CHALLENGE_EXPIRED
    del server.challenge_table[nonce_hex]
    server.consumed_nonces.add(nonce_hex)
    return challenge, None


def consume_challenge_strict(
    server: ServerState, nonce_hex: str, now: int
) -> Challenge:
    challenge, failure = consume_challenge(server, nonce_hex, now)
    if challenge is None:
        raise ChallengeError(f"challenge not honored: {failure.value}")
    return challenge


def gc_challenges(server: ServerState, now: int) -> int:
    """Prune table entries a grace period past expiry; returns count pruned."""
    stale = [
        nonce_hex
        for nonce_hex, challenge in server.challenge_table.items()
        if now > challenge.issued_at + challenge.expires_after + CHALLENGE_GC_GRACE
    ]
    for nonce_hex in stale:
        del server.challenge_table[nonce_hex]
    return len(stale)


def possession_commitment(local_share: Share, lkp_public: bytes) -> bytes:
    return digest(local_share.payload + lkp_public)


def credential_plaintext(scheme: Scheme, shares: list[Share]) -> bytes:
    return canonical_bytes(
        {"scheme": scheme.value, "shares": [share.to_wire() for share in shares]}
    )


def parse_credential_plaintext(data: bytes) -> tuple[Scheme, list[Share]]:
    obj = from_canonical_bytes(data)
    return Scheme(obj["scheme"]), [Share.from_wire(s) for s in obj["shares"]]


def at_rest_credential_bytes(document: DidDocument) -> bytes:
    """The sealed credential exactly as it sits in the public document."""
    return canonical_bytes(document.auth_credential.to_wire())


@dataclass(frozen=True)
class EnrollmentResult:
    did: Did
    document: DidDocument
    record: LedgerRecord
    refs: tuple[StorageRef, ...]


def _challenge_from_grant(body: dict) -> Challenge:
    return Challenge(
        nonce=from_hex(body["nonce"]),
        issued_at=body["issued_at"],
        expires_after=body["expires_after"],
    )


def enroll(
    client: ClientState,
    issuer: ServerState,
    ledger: Ledger,
    hubs: list[Hub],
    ibv: BiometricVector,
    rng: int | bytes | str | random.Random,
    channel: DirectChannel | None = None,
    scheme: Scheme = Scheme.XOR_2OF2,
    k: int = 2,
    n: int = 2,
    replicas: int = 1,
    credential_public: bytes | None = None,
    service_endpoints: list[ServiceEndpoint] | None = None,
    challenge_lifetime: int = DEFAULT_CHALLENGE_LIFETIME,
) -> EnrollmentResult:
    """Register a device and its split template; see the module notes."""
    if channel is None:
        channel = DirectChannel()
    generator = as_rng(rng)
    if scheme is Scheme.XOR_2OF2 and (k, n) != (2, 2):
        raise ConfigurationError("the XOR scheme is always 2-of-2")
    if replicas < 1 or replicas > len(hubs):
        raise ConfigurationError(
            f"replicas must be in 1..{len(hubs)}, got {replicas}"
        )
    session_id = rand_bytes(generator, SESSION_ID_LENGTH)

    request = ProtocolMessage(
        kind=MessageKind.ENROLL_REQUEST,
        session_id=session_id,
        sender=client.name,
        body={
            "enrollment_public": to_hex(client.lkp.public),
            "k": k,
            "n": n,
            "scheme": scheme.value,
        },
    )
    request = channel.send(client.name, issuer.name, request)

    challenge = issue_challenge(
        issuer, generator, channel.now, lifetime=challenge_lifetime
    )
    grant = ProtocolMessage(
        kind=MessageKind.CHALLENGE_GRANT,
        session_id=session_id,
        sender=issuer.name,
        body={
            "expires_after": challenge.expires_after,
            "issued_at": challenge.issued_at,
            "issuer_public": to_hex(issuer.signing.public),
            "nonce": to_hex(challenge.nonce),
            "rkp_public": to_hex(issuer.rkp.public),
        },
    )
    grant = channel.send(issuer.name, client.name, grant)

    # Device side: split, keep share 1, seal the rest for transit.
    if scheme is Scheme.XOR_2OF2:
        share_local, share_remote = split_xor(ibv, generator)
        remote_shares = [share_remote]
    else:
        shares = split_shamir(ibv, k, n, generator)
        share_local, remote_shares = shares[0], shares[1:]
    client.local_share = share_local
    client.issuer_public = from_hex(grant.body["issuer_public"])
    commitment = possession_commitment(share_local, client.lkp.public)
    grant_challenge = _challenge_from_grant(grant.body)
    transit = seal_envelope(
        credential_plaintext(scheme, remote_shares),
        from_hex(grant.body["rkp_public"]),
        grant_challenge,
        generator,
    )
    endpoints = service_endpoints or [
        ServiceEndpoint(role="issuer", locator=issuer.name)
    ]
    share_msg = ProtocolMessage(
        kind=MessageKind.ENROLL_SHARE,
        session_id=session_id,
        sender=client.name,
        body={
            "challenge": to_hex(grant_challenge.nonce),
            "possession_commitment": to_hex(commitment),
            "service_endpoints": [e.to_wire() for e in endpoints],
            "transit": transit.to_wire(),
        },
    )
    share_msg = channel.send(client.name, issuer.name, share_msg)

    # Issuer side: unwrap the transit envelope, re-seal at rest, sign,
    # replicate, register.  The plaintext shares exist only inside this
    # block and are dropped before the flow returns.
    issued = consume_challenge_strict(issuer, share_msg.body["challenge"], channel.now)
    plaintext = open_envelope(
        Envelope.from_wire(share_msg.body["transit"]), issuer.rkp, issued
    )
    credential = seal_envelope(
        plaintext,
        credential_public if credential_public is not None else issuer.rkp.public,
        issued,
        generator,
    )
    document = DidDocument.build(
        issuer_signing=issuer.signing,
        issuer_public=issuer.signing.public,
        enrollment_public=from_hex(request.body["enrollment_public"]),
        auth_credential=credential,
        possession_commitment=from_hex(share_msg.body["possession_commitment"]),
        service_endpoints=[
            ServiceEndpoint(role=e["role"], locator=e["locator"])
            for e in share_msg.body["service_endpoints"]
        ],
    )
    stored = document.stored_bytes()
    document_digest = digest(stored)
    did = Did.from_digest(document_digest)

    refs: list[StorageRef] = []
    created: list[StorageRef] = []
    try:
        for hub in hubs[:replicas]:
            existed = hub.contains(to_hex(document_digest))
            ref = hub.put_document(document)
            refs.append(ref)
            if not existed:
                created.append(ref)
        record = ledger.register(
            did=did,
            document_digest=document_digest,
            object_key=refs[0].object_key,
            hub_ids=[ref.hub_id for ref in refs],
            registered_at=channel.now,
        )
    except Exception:
        # Compensate: a failed registration must leave no replica it
        # wrote behind (objects that already existed stay).
        by_id = {hub.hub_id: hub for hub in hubs}
        for ref in created:
            by_id[ref.hub_id].delete(ref.object_key)
        raise

    result_msg = ProtocolMessage(
        kind=MessageKind.ENROLL_RESULT,
        session_id=session_id,
        sender=issuer.name,
        body={
            "did": str(did),
            "hub_ids": list(record.hub_ids),
            "object_key": record.object_key,
        },
    )
    result_msg = channel.send(issuer.name, client.name, result_msg)
    client.did = Did.parse(result_msg.body["did"])
    return EnrollmentResult(
        did=did,
        document=document.with_did(did),
        record=record,
        refs=tuple(refs),
    )


def verify_claim(
    verifier: ServerState,
    did: Did,
    claimed_enrollment_public: bytes,
    ledger: Ledger,
    hubs: dict[str, Hub],
) -> tuple[DidDocument | None, FailureReason | None]:
    """Resolve a DID and validate the stored document against its claim.

    Returns the verified document, or the reason it cannot be trusted.
    An unregistered DID raises: there is nothing to authenticate against.
    """
    record = ledger.resolve(did)
    data: bytes | None = None
    for hub_id in record.hub_ids:
        hub = hubs.get(hub_id)
        if hub is None:
            continue
        try:
            data = hub.get_bytes(record.object_key)
            break
        except NotFoundError:
            continue
    if data is None:
        raise NotFoundError(f"no replica of {record.object_key} is reachable")
    if digest(data) != record.document_digest:
        return None, FailureReason.TAMPER_DETECTED
    try:
        document = DidDocument.from_stored_bytes(data)
    except StorageError:
        return None, FailureReason.TAMPER_DETECTED
    if not document.signature_valid():
        return None, FailureReason.TAMPER_DETECTED
    if to_hex(document.issuer_public) not in verifier.known_issuers:
        return None, FailureReason.UNKNOWN_ISSUER
    if document.enrollment_public != claimed_enrollment_public:
        return None, FailureReason.KEY_MISMATCH
    return document.with_did(did), None


def open_credential(
    verifier: ServerState, document: DidDocument
) -> tuple[Scheme, list[Share]]:
    """Unseal the at-rest credential with whichever trusted key fits."""
    envelope = document.auth_credential
    pair = verifier.credential_keys.get(to_hex(envelope.recipient_key_id))
    if pair is None:
        raise KeyMismatchError("no trusted key opens this credential")
    return parse_credential_plaintext(open_envelope(envelope, pair, None))


def _send_auth_result(
    channel: DirectChannel,
    verifier: ServerState,
    client_name: str,
    session_id: bytes,
    outcome: AuthOutcome,
) -> AuthOutcome:
    message = ProtocolMessage(
        kind=MessageKind.AUTH_RESULT,
        session_id=session_id,
        sender=verifier.name,
        body=outcome.to_wire(),
    )
    channel.send(verifier.name, client_name, message)
    return outcome


def handle_share_and_cbv(
    verifier: ServerState,
    document: DidDocument,
    body: dict,
    now: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> AuthOutcome:
    """Verifier-side decision for the server-matching flow."""
    challenge, failure = consume_challenge(verifier, body["challenge"], now)
    if failure is not None:
        return AuthOutcome(False, AuthMode.REMOTE, failure)
    try:
        plaintext = open_envelope(
            Envelope.from_wire(body["envelope"]), verifier.rkp, challenge
        )
    except ChallengeMismatchError:
        return AuthOutcome(False, AuthMode.REMOTE, FailureReason.REPLAY)
    except (KeyMismatchError, TagVerificationError):
        return AuthOutcome(False, AuthMode.REMOTE, FailureReason.TAMPER_DETECTED)
    try:
        scheme, shares = open_credential(verifier, document)
    except KeyMismatchError:
        return AuthOutcome(False, AuthMode.REMOTE, FailureReason.KEY_MISMATCH)
    payload = from_canonical_bytes(plaintext)
    if "local_share" in payload:
        shares = shares + [Share.from_wire(payload["local_share"])]
    threshold_count = shares[0].k if shares else 2
    if len(shares) < threshold_count:
        raise ProtocolError(
            "credential shares cannot reconstruct without the device share"
        )
    reference = combine(shares)
    candidate = BiometricVector.from_bytes(from_hex(payload["cbv"]))
    result = match_vectors(reference, candidate, threshold)
    # Wipe: the reconstructed reference must not outlive the decision.
    del reference, candidate, shares, plaintext
    if not result.accepted:
        return AuthOutcome(False, AuthMode.REMOTE, FailureReason.BIOMETRIC_MISMATCH)
    return AuthOutcome(True, AuthMode.REMOTE)


def authenticate_remote(
    client: ClientState,
    verifier: ServerState,
    ledger: Ledger,
    hubs: dict[str, Hub],
    cbv: BiometricVector,
    rng: int | bytes | str | random.Random,
    channel: DirectChannel | None = None,
    include_local_share: bool = True,
    threshold: float = DEFAULT_THRESHOLD,
    challenge_lifetime: int = DEFAULT_CHALLENGE_LIFETIME,
) -> AuthOutcome:
    """Server-matching authentication for an enrolled client."""
    if client.did is None or client.local_share is None:
        raise ProtocolError("client is not enrolled")
    if channel is None:
        channel = DirectChannel()
    generator = as_rng(rng)
    session_id = rand_bytes(generator, SESSION_ID_LENGTH)

    request = ProtocolMessage(
        kind=MessageKind.AUTH_REQUEST,
        session_id=session_id,
        sender=client.name,
        body={
            "did": str(client.did),
            "enrollment_public": to_hex(client.lkp.public),
            "mode": AuthMode.REMOTE.value,
        },
    )
    request = channel.send(client.name, verifier.name, request)

    document, failure = verify_claim(
        verifier,
        Did.parse(request.body["did"]),
        from_hex(request.body["enrollment_public"]),
        ledger,
        hubs,
    )
    if failure is not None:
        return _send_auth_result(
            channel,
            verifier,
            client.name,
            session_id,
            AuthOutcome(False, AuthMode.REMOTE, failure),
        )

    challenge = issue_challenge(
        verifier, generator, channel.now, lifetime=challenge_lifetime
    )
    grant = ProtocolMessage(
        kind=MessageKind.CHALLENGE_GRANT,
        session_id=session_id,
        sender=verifier.name,
        body={
            "expires_after": challenge.expires_after,
            "issued_at": challenge.issued_at,
            "nonce": to_hex(challenge.nonce),
            "rkp_public": to_hex(verifier.rkp.public),
        },
    )
    grant = channel.send(verifier.name, client.name, grant)

    payload: dict = {"cbv": to_hex(cbv.bits)}
    if include_local_share:
        payload["local_share"] = client.local_share.to_wire()
    grant_challenge = _challenge_from_grant(grant.body)
    sealed = seal_envelope(
        canonical_bytes(payload),
        from_hex(grant.body["rkp_public"]),
        grant_challenge,
        generator,
    )
    presentation = ProtocolMessage(
        kind=MessageKind.SHARE_AND_CBV,
        session_id=session_id,
        sender=client.name,
        body={
            "challenge": to_hex(grant_challenge.nonce),
            "envelope": sealed.to_wire(),
        },
    )
    presentation = channel.send(client.name, verifier.name, presentation)

    outcome = handle_share_and_cbv(
        verifier, document, presentation.body, channel.now, threshold
    )
    return _send_auth_result(channel, verifier, client.name, session_id, outcome)


def insecure_local_proof(
    document: DidDocument, challenge_nonce: bytes, match_accepted: bool
) -> dict:
    """Possession proof keyed by the public commitment (pre-mitigation).

    Everything the tag binds is readable from the public document, which
    is what makes the spoofing forgery below possible.
    """
    at_rest = at_rest_credential_bytes(document)
    tag = hmac_tag(document.possession_commitment, at_rest + challenge_nonce)
    return {
        "challenge": to_hex(challenge_nonce),
        "match_accepted": match_accepted,
        "proof": to_hex(tag),
    }


def spoof_local_proof(document: DidDocument, challenge_nonce: bytes) -> dict:
    """Forge an accepting proof from public data alone.

    The adversary never holds a share, a template, or the device key: the
    commitment and the sealed credential both come straight off the hub.
    """
    return insecure_local_proof(document, challenge_nonce, match_accepted=True)


def mitigated_local_proof(
    lkp: KeyPair,
    document: DidDocument,
    challenge_nonce: bytes,
    match_accepted: bool,
) -> dict:
    """Possession proof keyed by a device signature over the challenge."""
    at_rest = at_rest_credential_bytes(document)
    signature = lkp.sign(challenge_nonce + digest(at_rest))
    tag = hmac_tag(digest(signature), at_rest + challenge_nonce)
    return {
        "challenge": to_hex(challenge_nonce),
        "match_accepted": match_accepted,
        "proof": to_hex(tag),
        "signature": to_hex(signature),
    }


def handle_hmac_proof(
    verifier: ServerState,
    document: DidDocument,
    body: dict,
    now: int,
    mitigation: bool,
) -> AuthOutcome:
    """Verifier-side decision for the device-matching flow."""
    challenge, failure = consume_challenge(verifier, body["challenge"], now)
    if failure is not None:
        return AuthOutcome(False, AuthMode.LOCAL, failure)
    at_rest = at_rest_credential_bytes(document)
    if mitigation:
        try:
            signature = from_hex(body["signature"]) if "signature" in body else b""
        except ValueError:
            signature = b""
        if not verify_signature(
            document.enrollment_public,
            challenge.nonce + digest(at_rest),
            signature,
        ):
            return AuthOutcome(False, AuthMode.LOCAL, FailureReason.SPOOF_DETECTED)
        key = digest(signature)
    else:
        key = document.possession_commitment
    try:
        tag = from_hex(body["proof"])
    except ValueError:
        tag = b""
    if not hmac_verify(key, at_rest + challenge.nonce, tag):
        return AuthOutcome(False, AuthMode.LOCAL, FailureReason.SPOOF_DETECTED)
    if not body["match_accepted"]:
        return AuthOutcome(False, AuthMode.LOCAL, FailureReason.BIOMETRIC_MISMATCH)
    return AuthOutcome(True, AuthMode.LOCAL)


def prepare_share_delivery(
    verifier: ServerState,
    document: DidDocument,
    challenge: Challenge,
    rng: random.Random,
) -> Envelope | None:
    """Re-seal the credential shares to the enrolled device key."""
    try:
        scheme, shares = open_credential(verifier, document)
    except KeyMismatchError:
        return None
    return seal_envelope(
        credential_plaintext(scheme, shares),
        document.enrollment_public,
        challenge,
        rng,
    )


def authenticate_local(
    client: ClientState,
    verifier: ServerState,
    ledger: Ledger,
    hubs: dict[str, Hub],
    cbv: BiometricVector,
    rng: int | bytes | str | random.Random,
    channel: DirectChannel | None = None,
    mitigation: bool = False,
    threshold: float = DEFAULT_THRESHOLD,
    challenge_lifetime: int = DEFAULT_CHALLENGE_LIFETIME,
) -> AuthOutcome:
    """Device-matching authentication for an enrolled client."""
    if client.did is None or client.local_share is None:
        raise ProtocolError("client is not enrolled")
    if channel is None:
        channel = DirectChannel()
    generator = as_rng(rng)
    session_id = rand_bytes(generator, SESSION_ID_LENGTH)

    request = ProtocolMessage(
        kind=MessageKind.AUTH_REQUEST,
        session_id=session_id,
        sender=client.name,
        body={
            "did": str(client.did),
            "enrollment_public": to_hex(client.lkp.public),
            "mode": AuthMode.LOCAL.value,
        },
    )
    request = channel.send(client.name, verifier.name, request)

    document, failure = verify_claim(
        verifier,
        Did.parse(request.body["did"]),
        from_hex(request.body["enrollment_public"]),
        ledger,
        hubs,
    )
    if failure is not None:
        return _send_auth_result(
            channel,
            verifier,
            client.name,
            session_id,
            AuthOutcome(False, AuthMode.LOCAL, failure),
        )

    challenge = issue_challenge(
        verifier, generator, channel.now, lifetime=challenge_lifetime
    )
    grant = ProtocolMessage(
        kind=MessageKind.CHALLENGE_GRANT,
        session_id=session_id,
        sender=verifier.name,
        body={
            "expires_after": challenge.expires_after,
            "issued_at": challenge.issued_at,
            "nonce": to_hex(challenge.nonce),
            "rkp_public": to_hex(verifier.rkp.public),
        },
    )
    grant = channel.send(verifier.name, client.name, grant)

    delivery_envelope = prepare_share_delivery(verifier, document, challenge, generator)
    if delivery_envelope is None:
        return _send_auth_result(
            channel,
            verifier,
            client.name,
            session_id,
            AuthOutcome(False, AuthMode.LOCAL, FailureReason.KEY_MISMATCH),
        )
    delivery = ProtocolMessage(
        kind=MessageKind.REMOTE_SHARE_DELIVERY,
        session_id=session_id,
        sender=verifier.name,
        body={
            "challenge": to_hex(challenge.nonce),
            "envelope": delivery_envelope.to_wire(),
        },
    )
    delivery = channel.send(verifier.name, client.name, delivery)

    # Device side: reconstruct, match, wipe, then prove possession.
    grant_challenge = _challenge_from_grant(grant.body)
    plaintext = open_envelope(
        Envelope.from_wire(delivery.body["envelope"]), client.lkp, grant_challenge
    )
    _, remote_shares = parse_credential_plaintext(plaintext)
    reference = combine([client.local_share] + remote_shares)
    result = match_vectors(reference, cbv, threshold)
    del reference, remote_shares, plaintext

    client_document = _fetch_own_document(client, ledger, hubs)
    if mitigation:
        proof_body = mitigated_local_proof(
            client.lkp, client_document, grant_challenge.nonce, result.accepted
        )
    else:
        proof_body = insecure_local_proof(
            client_document, grant_challenge.nonce, result.accepted
        )
    proof = ProtocolMessage(
        kind=MessageKind.HMAC_PROOF,
        session_id=session_id,
        sender=client.name,
        body=proof_body,
    )
    proof = channel.send(client.name, verifier.name, proof)

    outcome = handle_hmac_proof(
        verifier, document, proof.body, channel.now, mitigation
    )
    return _send_auth_result(channel, verifier, client.name, session_id, outcome)


def _fetch_own_document(
    client: ClientState, ledger: Ledger, hubs: dict[str, Hub]
) -> DidDocument:
    # The document is public; the device reads it back the same way any
    # verifier or adversary would.
    record = ledger.resolve(client.did)
    for hub_id in record.hub_ids:
        hub = hubs.get(hub_id)
        if hub is None:
            continue
        try:
            return hub.get_document(record.object_key).with_did(client.did)
        except NotFoundError:
            continue
    raise NotFoundError(f"no replica of {record.object_key} is reachable")


def match_on_device(
    reference: BiometricVector,
    candidate: BiometricVector,
    threshold: float = DEFAULT_THRESHOLD,
) -> AuthOutcome:
    """Degenerate standalone mode: no identity layer, just the matcher."""
    result = match_vectors(reference, candidate, threshold)
    if result.accepted:
        return AuthOutcome(True, AuthMode.LOCAL)
    return AuthOutcome(False, AuthMode.LOCAL, FailureReason.BIOMETRIC_MISMATCH)
