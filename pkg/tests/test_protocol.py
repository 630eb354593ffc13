"""Enrollment and authentication flows at the library level."""

import pytest

from horcrux.biometrics import derive_cbv, generate_ibv
from horcrux.crypto import KeyRole, digest, generate_keypair
from horcrux.encoding import derive_rng, to_hex
from horcrux.errors import (
    AlreadyRegisteredError,
    ChallengeError,
    HubWriteError,
    NotFoundError,
    ProtocolError,
)
from horcrux.ledger import Did, Ledger
from horcrux.protocol import (
    AuthMode,
    AuthOutcome,
    DirectChannel,
    FailureReason,
    authenticate_local,
    authenticate_remote,
    consume_challenge,
    enroll,
    gc_challenges,
    handle_hmac_proof,
    insecure_local_proof,
    issue_challenge,
    make_client,
    make_server,
    match_on_device,
    mitigated_local_proof,
    open_credential,
    possession_commitment,
    spoof_local_proof,
    verify_claim,
)
from horcrux.sharing import Scheme
from horcrux.storage import InMemoryHub


def _world(seed=1, trust_shared=True):
    issuer = make_server("issuer", derive_rng(seed, "issuer"))
    verifier = make_server("verifier", derive_rng(seed, "verifier"))
    client = make_client("client", derive_rng(seed, "client"))
    for server in (issuer, verifier):
        server.trust_issuer(issuer.signing.public)
    if trust_shared:
        issuer.hold_credential_key(issuer.rkp)
        verifier.hold_credential_key(issuer.rkp)
    hubs = {f"hub-{i}": InMemoryHub(f"hub-{i}") for i in range(2)}
    return issuer, verifier, client, hubs, Ledger()


def _enroll(issuer, client, hubs, ledger, seed=1, **kwargs):
    ibv = generate_ibv(derive_rng(seed, "ibv"), 512)
    result = enroll(
        client,
        issuer,
        ledger,
        list(hubs.values()),
        ibv,
        derive_rng(seed, "enroll"),
        **kwargs,
    )
    return ibv, result


def test_enrollment_state_and_artifacts():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, result = _enroll(issuer, client, hubs, ledger)

    assert client.did == result.did
    assert client.local_share is not None and client.local_share.index == 1
    assert client.issuer_public == issuer.signing.public

    record = ledger.resolve(result.did)
    assert record.document_digest == digest(result.document.stored_bytes())
    assert record.object_key == to_hex(record.document_digest)
    assert ledger.verify_chain()

    stored = hubs[record.hub_ids[0]].get_document(record.object_key)
    assert stored == result.document
    assert stored.possession_commitment == possession_commitment(
        client.local_share, client.lkp.public
    )
    assert stored.enrollment_public == client.lkp.public
    # the issuer keeps no share material outside the sealed credential
    assert result.document.signature_valid()


def test_enrollment_replicates_to_requested_hubs():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger, replicas=2)
    assert len(result.record.hub_ids) == 2
    for hub_id in result.record.hub_ids:
        assert hubs[hub_id].contains(result.record.object_key)


def test_enrollment_compensates_failed_hub_writes():
    issuer, verifier, client, hubs, ledger = _world()
    hubs["hub-1"].failing = True
    with pytest.raises(HubWriteError):
        _enroll(issuer, client, hubs, ledger, replicas=2)
    # the write to hub-0 succeeded first and must have been rolled back
    assert not hubs["hub-0"]._objects
    assert len(ledger) == 0


def test_enrollment_compensates_ledger_conflict():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger, seed=1)
    # a second issuer instance with identical keys and streams produces
    # the identical document; the occupied DID must fail registration
    # without dragging the existing replica down with it
    issuer_b = make_server("issuer", derive_rng(1, "issuer"))
    issuer_b.hold_credential_key(issuer_b.rkp)
    client_b = make_client("client", derive_rng(1, "client"))
    before = dict(hubs["hub-0"]._objects)
    with pytest.raises(AlreadyRegisteredError):
        _enroll(issuer_b, client_b, hubs, ledger, seed=1)
    assert hubs["hub-0"]._objects == before
    assert len(ledger) == 1


def test_share_material_not_on_wire_in_plain_enrollment():
    issuer, verifier, client, hubs, ledger = _world()

    class RecordingChannel(DirectChannel):
        wires = []

        def send(self, sender, receiver, message):
            self.wires.append(message.to_wire())
            return super().send(sender, receiver, message)

    channel = RecordingChannel()
    ibv, result = _enroll(issuer, client, hubs, ledger, channel=channel)
    text = b"".join(repr(w).encode() for w in channel.wires)
    assert to_hex(ibv.bits).encode() not in text
    assert to_hex(client.local_share.payload).encode() not in text


def test_remote_auth_accepts_genuine_rejects_impostor():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, _ = _enroll(issuer, client, hubs, ledger)
    genuine = derive_cbv(ibv, 0.1, derive_rng(1, "flip"))
    impostor = generate_ibv(derive_rng(1, "other"), 512)

    accepted = authenticate_remote(
        client, verifier, ledger, hubs, genuine, derive_rng(1, "a1")
    )
    assert accepted == AuthOutcome(True, AuthMode.REMOTE)

    rejected = authenticate_remote(
        client, verifier, ledger, hubs, impostor, derive_rng(1, "a2")
    )
    assert rejected.failure_reason is FailureReason.BIOMETRIC_MISMATCH


def test_local_auth_accepts_genuine_rejects_impostor():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, _ = _enroll(issuer, client, hubs, ledger)
    genuine = derive_cbv(ibv, 0.1, derive_rng(2, "flip"))
    impostor = generate_ibv(derive_rng(2, "other"), 512)

    for mitigation in (False, True):
        accepted = authenticate_local(
            client, verifier, ledger, hubs, genuine,
            derive_rng(2, f"a1:{mitigation}"), mitigation=mitigation,
        )
        assert accepted == AuthOutcome(True, AuthMode.LOCAL)
        rejected = authenticate_local(
            client, verifier, ledger, hubs, impostor,
            derive_rng(2, f"a2:{mitigation}"), mitigation=mitigation,
        )
        assert rejected.failure_reason is FailureReason.BIOMETRIC_MISMATCH


def test_unenrolled_client_cannot_authenticate():
    issuer, verifier, client, hubs, ledger = _world()
    capture = generate_ibv(derive_rng(3, "c"), 512)
    with pytest.raises(ProtocolError):
        authenticate_remote(client, verifier, ledger, hubs, capture, derive_rng(3, "a"))


def test_shamir_remote_auth_without_device_share():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, _ = _enroll(
        issuer, client, hubs, ledger, scheme=Scheme.SHAMIR, k=2, n=3
    )
    genuine = derive_cbv(ibv, 0.1, derive_rng(4, "flip"))
    outcome = authenticate_remote(
        client, verifier, ledger, hubs, genuine, derive_rng(4, "a"),
        include_local_share=False,
    )
    assert outcome.accepted


def test_xor_remote_auth_requires_device_share():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, _ = _enroll(issuer, client, hubs, ledger)
    genuine = derive_cbv(ibv, 0.1, derive_rng(5, "flip"))
    with pytest.raises(ProtocolError):
        authenticate_remote(
            client, verifier, ledger, hubs, genuine, derive_rng(5, "a"),
            include_local_share=False,
        )


def test_escrow_trust_configuration():
    issuer, verifier, client, hubs, ledger = _world(trust_shared=False)
    escrow = generate_keypair(KeyRole.RKP, derive_rng(6, "escrow"))
    issuer.hold_credential_key(escrow)
    verifier.hold_credential_key(escrow)
    ibv, result = _enroll(
        issuer, client, hubs, ledger, credential_public=escrow.public
    )
    assert result.document.auth_credential.recipient_key_id == escrow.key_id
    genuine = derive_cbv(ibv, 0.1, derive_rng(6, "flip"))
    assert authenticate_remote(
        client, verifier, ledger, hubs, genuine, derive_rng(6, "a")
    ).accepted


def test_verifier_without_credential_key_reports_key_mismatch():
    issuer, verifier, client, hubs, ledger = _world()
    verifier.credential_keys.clear()
    ibv, _ = _enroll(issuer, client, hubs, ledger)
    genuine = derive_cbv(ibv, 0.1, derive_rng(7, "flip"))
    outcome = authenticate_remote(
        client, verifier, ledger, hubs, genuine, derive_rng(7, "a")
    )
    assert outcome.failure_reason is FailureReason.KEY_MISMATCH


def test_verify_claim_paths():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger)
    record = ledger.resolve(result.did)

    document, failure = verify_claim(
        verifier, result.did, client.lkp.public, ledger, hubs
    )
    assert failure is None and document.did == result.did

    # unknown DID is a resolution error, not an outcome
    with pytest.raises(NotFoundError):
        verify_claim(verifier, Did("a" * 26), client.lkp.public, ledger, hubs)

    # wrong claimed key
    other = make_client("other", derive_rng(8, "other"))
    _, failure = verify_claim(verifier, result.did, other.lkp.public, ledger, hubs)
    assert failure is FailureReason.KEY_MISMATCH

    # untrusted issuer
    stranger = make_server("stranger", derive_rng(8, "stranger"))
    stranger.hold_credential_key(issuer.rkp)
    _, failure = verify_claim(stranger, result.did, client.lkp.public, ledger, hubs)
    assert failure is FailureReason.UNKNOWN_ISSUER

    # tampered replica
    data = bytearray(hubs[record.hub_ids[0]].get_bytes(record.object_key))
    data[10] ^= 0x40
    hubs[record.hub_ids[0]].tamper(record.object_key, bytes(data))
    _, failure = verify_claim(verifier, result.did, client.lkp.public, ledger, hubs)
    assert failure is FailureReason.TAMPER_DETECTED


def test_verify_claim_fails_over_to_surviving_replica():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger, replicas=2)
    record = ledger.resolve(result.did)
    hubs[record.hub_ids[0]].delete(record.object_key)
    document, failure = verify_claim(
        verifier, result.did, client.lkp.public, ledger, hubs
    )
    assert failure is None and document is not None
    hubs[record.hub_ids[1]].delete(record.object_key)
    with pytest.raises(NotFoundError):
        verify_claim(verifier, result.did, client.lkp.public, ledger, hubs)


def test_challenge_consume_once_and_expiry():
    server = make_server("server", derive_rng(9, "srv"))
    challenge = issue_challenge(server, derive_rng(9, "ch"), now=0, lifetime=10)
    nonce = to_hex(challenge.nonce)

    consumed, failure = consume_challenge(server, nonce, now=5)
    assert consumed == challenge and failure is None
    _, failure = consume_challenge(server, nonce, now=6)
    assert failure is FailureReason.REPLAY

    expired = issue_challenge(server, derive_rng(9, "ch2"), now=0, lifetime=10)
    _, failure = consume_challenge(server, to_hex(expired.nonce), now=11)
    assert failure is FailureReason.CHALLENGE_EXPIRED

    _, failure = consume_challenge(server, "00" * 16, now=0)
    assert failure is FailureReason.CHALLENGE_EXPIRED


def test_challenge_gc_prunes_table_not_consumed_set():
    server = make_server("server", derive_rng(10, "srv"))
    challenge = issue_challenge(server, derive_rng(10, "ch"), now=0, lifetime=10)
    consumed = issue_challenge(server, derive_rng(10, "ch2"), now=0, lifetime=10)
    consume_challenge(server, to_hex(consumed.nonce), now=1)

    assert gc_challenges(server, now=20) == 0  # inside the grace window
    assert gc_challenges(server, now=21) == 1
    assert not server.challenge_table
    # consumed nonces are remembered forever
    _, failure = consume_challenge(server, to_hex(consumed.nonce), now=100)
    assert failure is FailureReason.REPLAY


def test_expired_challenge_rejects_authentication():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, _ = _enroll(issuer, client, hubs, ledger)
    genuine = derive_cbv(ibv, 0.1, derive_rng(11, "flip"))

    class SlowChannel(DirectChannel):
        def send(self, sender, receiver, message):
            self.now += 50
            return message

    outcome = authenticate_remote(
        client, verifier, ledger, hubs, genuine, derive_rng(11, "a"),
        channel=SlowChannel(), challenge_lifetime=20,
    )
    assert outcome.failure_reason is FailureReason.CHALLENGE_EXPIRED


def test_spoofed_proof_accepted_without_mitigation():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger)
    # adversary sees only public artifacts
    record = ledger.resolve(result.did)
    public_document = hubs[record.hub_ids[0]].get_document(record.object_key)

    challenge = issue_challenge(verifier, derive_rng(12, "ch"), now=0)
    body = spoof_local_proof(public_document, challenge.nonce)
    outcome = handle_hmac_proof(verifier, public_document, body, 1, mitigation=False)
    assert outcome == AuthOutcome(True, AuthMode.LOCAL)


def test_spoofed_proof_detected_with_mitigation():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger)
    record = ledger.resolve(result.did)
    public_document = hubs[record.hub_ids[0]].get_document(record.object_key)

    challenge = issue_challenge(verifier, derive_rng(13, "ch"), now=0)
    fake_lkp = generate_keypair(KeyRole.LKP, derive_rng(13, "fake"))
    body = mitigated_local_proof(fake_lkp, public_document, challenge.nonce, True)
    outcome = handle_hmac_proof(verifier, public_document, body, 1, mitigation=True)
    assert outcome.failure_reason is FailureReason.SPOOF_DETECTED

    # a proof missing the signature entirely is also spoofing
    challenge = issue_challenge(verifier, derive_rng(13, "ch2"), now=0)
    body = insecure_local_proof(public_document, challenge.nonce, True)
    outcome = handle_hmac_proof(verifier, public_document, body, 1, mitigation=True)
    assert outcome.failure_reason is FailureReason.SPOOF_DETECTED


def test_mitigated_proof_from_enrolled_device_verifies():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger)
    challenge = issue_challenge(verifier, derive_rng(14, "ch"), now=0)
    body = mitigated_local_proof(client.lkp, result.document, challenge.nonce, True)
    outcome = handle_hmac_proof(verifier, result.document, body, 1, mitigation=True)
    assert outcome.accepted


def test_bad_proof_tag_is_spoof_detected():
    issuer, verifier, client, hubs, ledger = _world()
    _, result = _enroll(issuer, client, hubs, ledger)
    challenge = issue_challenge(verifier, derive_rng(15, "ch"), now=0)
    body = insecure_local_proof(result.document, challenge.nonce, True)
    body["proof"] = "00" * 32
    outcome = handle_hmac_proof(verifier, result.document, body, 1, mitigation=False)
    assert outcome.failure_reason is FailureReason.SPOOF_DETECTED


def test_open_credential_recovers_remote_shares():
    issuer, verifier, client, hubs, ledger = _world()
    ibv, result = _enroll(issuer, client, hubs, ledger, scheme=Scheme.SHAMIR, k=2, n=4)
    scheme, shares = open_credential(verifier, result.document)
    assert scheme is Scheme.SHAMIR
    assert [s.index for s in shares] == [2, 3, 4]
    from horcrux.sharing import combine

    assert combine(shares[:2]).bits == ibv.bits


def test_match_on_device_degenerate_mode():
    ibv = generate_ibv(derive_rng(16, "ibv"), 512)
    genuine = derive_cbv(ibv, 0.1, derive_rng(16, "flip"))
    impostor = generate_ibv(derive_rng(16, "imp"), 512)
    assert match_on_device(ibv, genuine).accepted
    rejected = match_on_device(ibv, impostor)
    assert rejected.failure_reason is FailureReason.BIOMETRIC_MISMATCH


def test_auth_outcome_invariants():
    with pytest.raises(ProtocolError):
        AuthOutcome(True, AuthMode.REMOTE, FailureReason.REPLAY)
    with pytest.raises(ProtocolError):
        AuthOutcome(False, AuthMode.REMOTE)


def test_nonce_collision_refused():
    server = make_server("server", derive_rng(17, "srv"))

    class FixedRng:
        def randbytes(self, n):
            return b"\x01" * n

    issue_challenge(server, FixedRng(), now=0)
    with pytest.raises(ChallengeError):
        issue_challenge(server, FixedRng(), now=0)
