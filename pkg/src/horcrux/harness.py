"""Deterministic multi-actor simulation harness.

A scenario builds a tiny world (one device, one issuing server, one
distinct verifying server, a handful of hubs, one ledger), enrolls the
device, and runs one authentication under a configured adversary.  All
randomness flows from labeled substreams of a single seed, the clock is
logical (one tick per channel send), and the transcript is canonical
JSON lines, so equal seeds give byte-identical transcripts.

Adversaries:

* ``none``: honest run.
* ``replay``: records the client's final presentation during an honest
  run, then re-presents it verbatim in a fresh session.
* ``tamper-hub``: flips one bit of every stored document replica
  between enrollment and authentication.
* ``mitm-observe``: passively records every wire message; scenarios
  expose the capture so tests can prove no secret material appears.
* ``share-spoof``: device-matching mode only: forges the possession
  proof from public hub data without shares, templates, or device keys.

``compute_error_rates`` reuses one enrollment and drives full
server-matching authentications for N genuine and N impostor captures,
reporting empirical false rejection and false acceptance rates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, fields

from .biometrics import (
    DEFAULT_GENUINE_FLIP_PROB,
    DEFAULT_LENGTH,
    DEFAULT_THRESHOLD,
    BiometricVector,
    derive_cbv,
    generate_ibv,
    match_vectors,
)
from .crypto import KeyPair, KeyRole, generate_keypair
from .encoding import (
    canonical_bytes,
    contains_needle,
    derive_rng,
    from_canonical_bytes,
    iter_binary_fields,
    rand_bytes,
    to_b64,
    to_hex,
)
from .errors import ConfigurationError, ProtocolError
from .ledger import Did, Ledger, verify_export
from .protocol import (
    AuthMode,
    AuthOutcome,
    ClientState,
    EnrollmentResult,
    MessageKind,
    ProtocolMessage,
    ServerState,
    SESSION_ID_LENGTH,
    authenticate_local,
    authenticate_remote,
    enroll,
    gc_challenges,
    handle_hmac_proof,
    handle_share_and_cbv,
    issue_challenge,
    make_client,
    make_server,
    mitigated_local_proof,
    open_credential,
    prepare_share_delivery,
    spoof_local_proof,
    verify_claim,
)
from .sharing import Scheme
from .storage import DidDocument, Hub, InMemoryHub

MODES = ("remote", "local")
SCHEMES = ("xor", "shamir")
ADVERSARIES = ("none", "replay", "tamper-hub", "mitm-observe", "share-spoof")
TRUST_MODELS = ("shared-rkp", "escrow")
DEFAULT_TICK_BUDGET = 10_000


@dataclass(frozen=True)
class SimulationConfig:
    """Flat scenario parameters; every field maps to one config-file key."""

    seed: int = 42
    mode: str = "remote"
    scheme: str = "xor"
    shamir_k: int = 2
    shamir_n: int = 3
    vector_length: int = DEFAULT_LENGTH
    threshold: float = DEFAULT_THRESHOLD
    genuine_flip_prob: float = DEFAULT_GENUINE_FLIP_PROB
    adversary: str = "none"
    mitigation: bool = False
    impostor: bool = False
    include_local_share: bool = True
    hub_count: int = 2
    replicas: int = 1
    trust: str = "shared-rkp"
    challenge_lifetime: int = 100
    tick_budget: int = DEFAULT_TICK_BUDGET

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}")
        if self.adversary not in ADVERSARIES:
            raise ConfigurationError(f"adversary must be one of {ADVERSARIES}")
        if self.trust not in TRUST_MODELS:
            raise ConfigurationError(f"trust must be one of {TRUST_MODELS}")
        if self.adversary == "share-spoof" and self.mode != "local":
            raise ConfigurationError(
                "the share-spoof adversary targets the device-matching mode"
            )
        if self.scheme == "shamir" and not 2 <= self.shamir_k <= self.shamir_n <= 255:
            raise ConfigurationError("need 2 <= shamir_k <= shamir_n <= 255")
        if self.vector_length <= 0 or self.vector_length % 8 != 0:
            raise ConfigurationError("vector_length must be a positive multiple of 8")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError("threshold must be in [0, 1]")
        if not 0.0 <= self.genuine_flip_prob <= 1.0:
            raise ConfigurationError("genuine_flip_prob must be in [0, 1]")
        if self.hub_count < 1:
            raise ConfigurationError("hub_count must be at least 1")
        if not 1 <= self.replicas <= self.hub_count:
            raise ConfigurationError("replicas must be in 1..hub_count")
        if self.challenge_lifetime <= 0:
            raise ConfigurationError("challenge_lifetime must be positive")
        if self.tick_budget <= 0:
            raise ConfigurationError("tick_budget must be positive")
        if not self.include_local_share:
            if self.scheme != "shamir" or self.shamir_n - 1 < self.shamir_k:
                raise ConfigurationError(
                    "matching without the device share needs shamir_n - 1 >= shamir_k"
                )

    def to_note(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TRUE_WORDS = frozenset({"true", "yes", "on", "1"})
_FALSE_WORDS = frozenset({"false", "no", "off", "0"})


def parse_config(text: str) -> SimulationConfig:
    """Parse the flat ``key = value`` format; # starts a comment."""
    known = {f.name: f.type for f in fields(SimulationConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        kind = known[key]
        try:
            if kind == "int":
                values[key] = int(value)
            elif kind == "float":
                values[key] = float(value)
            elif kind == "bool":
                lowered = value.lower()
                if lowered in _TRUE_WORDS:
                    values[key] = True
                elif lowered in _FALSE_WORDS:
                    values[key] = False
                else:
                    raise ValueError(f"not a boolean: {value!r}")
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: {exc}") from exc
    config = SimulationConfig(**values)
    config.validate()
    return config


def load_config(path: str) -> SimulationConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


class LogicalClock:
    def __init__(self) -> None:
        self.tick = 0

    def advance(self) -> int:
        self.tick += 1
        return self.tick


class Transcript:
    """Canonical JSON-lines record of everything a scenario did."""

    def __init__(self) -> None:
        self._lines: list[bytes] = []

    def note(self, tick: int, actor: str, note: dict) -> None:
        self._lines.append(
            canonical_bytes(
                {"actor": actor, "direction": "note", "note": note, "tick": tick}
            )
        )

    def message(self, tick: int, actor: str, direction: str, wire: dict) -> None:
        self._lines.append(
            canonical_bytes(
                {"actor": actor, "direction": direction, "message": wire, "tick": tick}
            )
        )

    def to_bytes(self) -> bytes:
        return b"".join(line + b"\n" for line in self._lines)

    def write(self, path: str) -> None:
        with open(path, "wb") as handle:
            handle.write(self.to_bytes())


class Adversary:
    """Base: a passive wire that delivers messages unchanged."""

    name = "none"

    def on_message(
        self, sender: str, receiver: str, message: ProtocolMessage
    ) -> ProtocolMessage:
        return message


class MitmObserveAdversary(Adversary):
    name = "mitm-observe"

    def __init__(self) -> None:
        self.observed: list[dict] = []

    def on_message(
        self, sender: str, receiver: str, message: ProtocolMessage
    ) -> ProtocolMessage:
        self.observed.append(message.to_wire())
        return message


class ReplayAdversary(Adversary):
    """Captures the client's final presentation for later re-use."""

    name = "replay"

    def __init__(self) -> None:
        self.captured: ProtocolMessage | None = None

    def on_message(
        self, sender: str, receiver: str, message: ProtocolMessage
    ) -> ProtocolMessage:
        if message.kind in (MessageKind.SHARE_AND_CBV, MessageKind.HMAC_PROOF):
            self.captured = message
        return message


class Channel:
    """Delivers messages, drives the clock, logs, enforces the budget."""

    def __init__(
        self,
        clock: LogicalClock,
        transcript: Transcript,
        adversary: Adversary | None = None,
        tick_budget: int = DEFAULT_TICK_BUDGET,
    ) -> None:
        self.clock = clock
        self.transcript = transcript
        self.adversary = adversary or Adversary()
        self.tick_budget = tick_budget
        self.wire_log: list[dict] = []

    @property
    def now(self) -> int:
        return self.clock.tick

    def send(
        self, sender: str, receiver: str, message: ProtocolMessage
    ) -> ProtocolMessage:
        tick = self.clock.advance()
        if tick > self.tick_budget:
            raise ProtocolError(f"tick budget of {self.tick_budget} exhausted")
        self.transcript.message(tick, sender, "send", message.to_wire())
        self.wire_log.append(message.to_wire())
        delivered = self.adversary.on_message(sender, receiver, message)
        self.transcript.message(tick, receiver, "recv", delivered.to_wire())
        self.wire_log.append(delivered.to_wire())
        return delivered


@dataclass
class World:
    """Actors and infrastructure shared by one scenario."""

    issuer: ServerState
    verifier: ServerState
    client: ClientState
    hubs: dict[str, Hub]
    ledger: Ledger
    credential_public: bytes | None
    secrets: list[bytes]


def build_world(config: SimulationConfig) -> World:
    issuer = make_server("issuer", derive_rng(config.seed, "issuer-keys"))
    verifier = make_server("verifier", derive_rng(config.seed, "verifier-keys"))
    client = make_client("client", derive_rng(config.seed, "client-keys"))
    for server in (issuer, verifier):
        server.trust_issuer(issuer.signing.public)
    secrets = [
        issuer.rkp.private,
        issuer.signing.private,
        verifier.rkp.private,
        verifier.signing.private,
        client.lkp.private,
    ]
    credential_public: bytes | None = None
    if config.trust == "escrow":
        escrow = generate_keypair(KeyRole.RKP, derive_rng(config.seed, "escrow-keys"))
        credential_public = escrow.public
        issuer.hold_credential_key(escrow)
        verifier.hold_credential_key(escrow)
        secrets.append(escrow.private)
    else:
        issuer.hold_credential_key(issuer.rkp)
        verifier.hold_credential_key(issuer.rkp)
    hubs: dict[str, Hub] = {
        f"hub-{i}": InMemoryHub(f"hub-{i}", capability="document-store")
        for i in range(config.hub_count)
    }
    return World(
        issuer=issuer,
        verifier=verifier,
        client=client,
        hubs=hubs,
        ledger=Ledger(),
        credential_public=credential_public,
        secrets=secrets,
    )


def _scheme_of(config: SimulationConfig) -> tuple[Scheme, int, int]:
    if config.scheme == "xor":
        return Scheme.XOR_2OF2, 2, 2
    return Scheme.SHAMIR, config.shamir_k, config.shamir_n


@dataclass
class ScenarioResult:
    config: SimulationConfig
    outcome: AuthOutcome | None
    enrollment: EnrollmentResult
    did: Did
    transcript: bytes
    wire_log: list[dict]
    observed: list[dict]
    needles: list[bytes]
    world: World


def _collect_needles(
    world: World,
    ibv: BiometricVector,
    candidate: BiometricVector | None,
    enrollment: EnrollmentResult,
) -> list[bytes]:
    needles = list(world.secrets)
    needles.append(ibv.bits)
    if candidate is not None:
        needles.append(candidate.bits)
    if world.client.local_share is not None:
        needles.append(world.client.local_share.payload)
    _, credential_shares = open_credential(world.issuer, enrollment.document)
    needles.extend(share.payload for share in credential_shares)
    return needles


def run_enrollment(
    config: SimulationConfig, transcript_path: str | None = None
) -> ScenarioResult:
    """Build a world and enroll the device; no authentication."""
    config.validate()
    world = build_world(config)
    clock, transcript = LogicalClock(), Transcript()
    channel = Channel(clock, transcript, tick_budget=config.tick_budget)
    transcript.note(
        0, "harness", {"event": "scenario-start", "config": config.to_note()}
    )
    enrollment = _enroll_in_world(config, world, channel)
    transcript.note(
        clock.tick,
        "harness",
        {"event": "scenario-end", "did": str(enrollment.did)},
    )
    data = transcript.to_bytes()
    if transcript_path is not None:
        transcript.write(transcript_path)
    return ScenarioResult(
        config=config,
        outcome=None,
        enrollment=enrollment,
        did=enrollment.did,
        transcript=data,
        wire_log=channel.wire_log,
        observed=[],
        needles=_collect_needles(world, _scenario_ibv(config), None, enrollment),
        world=world,
    )


def _scenario_ibv(config: SimulationConfig) -> BiometricVector:
    return generate_ibv(derive_rng(config.seed, "ibv"), config.vector_length)


def _scenario_candidate(
    config: SimulationConfig, ibv: BiometricVector
) -> BiometricVector:
    if config.impostor:
        return generate_ibv(derive_rng(config.seed, "impostor"), config.vector_length)
    return derive_cbv(ibv, config.genuine_flip_prob, derive_rng(config.seed, "cbv"))


def _enroll_in_world(
    config: SimulationConfig, world: World, channel: Channel
) -> EnrollmentResult:
    scheme, k, n = _scheme_of(config)
    ibv = _scenario_ibv(config)
    enrollment = enroll(
        world.client,
        world.issuer,
        world.ledger,
        list(world.hubs.values()),
        ibv,
        derive_rng(config.seed, "enroll"),
        channel=channel,
        scheme=scheme,
        k=k,
        n=n,
        replicas=config.replicas,
        credential_public=world.credential_public,
        challenge_lifetime=config.challenge_lifetime,
    )
    return enrollment


def _tamper_hubs(config: SimulationConfig, world: World, enrollment) -> None:
    rng = derive_rng(config.seed, "adversary")
    for hub_id in enrollment.record.hub_ids:
        hub = world.hubs[hub_id]
        data = bytearray(hub.get_bytes(enrollment.record.object_key))
        bit = rng.randrange(len(data) * 8)
        data[bit // 8] ^= 1 << (7 - bit % 8)
        hub.tamper(enrollment.record.object_key, bytes(data))


def _replay_attempt(
    config: SimulationConfig,
    world: World,
    channel: Channel,
    captured: ProtocolMessage,
    enrollment: EnrollmentResult,
) -> AuthOutcome:
    """Fresh session that re-presents a recorded client message."""
    rng = derive_rng(config.seed, "replay")
    verifier = world.verifier
    session_id = rand_bytes(rng, SESSION_ID_LENGTH)
    mode = AuthMode.REMOTE if config.mode == "remote" else AuthMode.LOCAL
    request = ProtocolMessage(
        kind=MessageKind.AUTH_REQUEST,
        session_id=session_id,
        sender="adversary",
        body={
            "did": str(enrollment.did),
            "enrollment_public": to_hex(enrollment.document.enrollment_public),
            "mode": mode.value,
        },
    )
    channel.send("adversary", verifier.name, request)
    document, failure = verify_claim(
        verifier,
        enrollment.did,
        enrollment.document.enrollment_public,
        world.ledger,
        world.hubs,
    )
    assert failure is None and document is not None
    challenge = issue_challenge(
        verifier, rng, channel.now, lifetime=config.challenge_lifetime
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
    channel.send(verifier.name, "adversary", grant)
    replayed = channel.send("adversary", verifier.name, captured)
    if replayed.kind is MessageKind.SHARE_AND_CBV:
        outcome = handle_share_and_cbv(
            verifier, document, replayed.body, channel.now, config.threshold
        )
    else:
        outcome = handle_hmac_proof(
            verifier, document, replayed.body, channel.now, config.mitigation
        )
    result = ProtocolMessage(
        kind=MessageKind.AUTH_RESULT,
        session_id=session_id,
        sender=verifier.name,
        body=outcome.to_wire(),
    )
    channel.send(verifier.name, "adversary", result)
    return outcome


def _spoof_attempt(
    config: SimulationConfig,
    world: World,
    channel: Channel,
    enrollment: EnrollmentResult,
) -> AuthOutcome:
    """Drive the device-matching flow with only public knowledge.

    The adversary reads the ledger record and the hub-stored document,
    claims the victim's identity, ignores the share delivery it cannot
    open, and fabricates the possession proof.
    """
    rng = derive_rng(config.seed, "spoof")
    verifier = world.verifier
    record = world.ledger.resolve(enrollment.did)
    data = world.hubs[record.hub_ids[0]].get_bytes(record.object_key)
    public_document = DidDocument.from_stored_bytes(data)

    session_id = rand_bytes(rng, SESSION_ID_LENGTH)
    request = ProtocolMessage(
        kind=MessageKind.AUTH_REQUEST,
        session_id=session_id,
        sender="adversary",
        body={
            "did": str(enrollment.did),
            "enrollment_public": to_hex(public_document.enrollment_public),
            "mode": AuthMode.LOCAL.value,
        },
    )
    channel.send("adversary", verifier.name, request)
    document, failure = verify_claim(
        verifier,
        enrollment.did,
        public_document.enrollment_public,
        world.ledger,
        world.hubs,
    )
    assert failure is None and document is not None
    challenge = issue_challenge(
        verifier, rng, channel.now, lifetime=config.challenge_lifetime
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
    channel.send(verifier.name, "adversary", grant)
    delivery_envelope = prepare_share_delivery(verifier, document, challenge, rng)
    assert delivery_envelope is not None
    delivery = ProtocolMessage(
        kind=MessageKind.REMOTE_SHARE_DELIVERY,
        session_id=session_id,
        sender=verifier.name,
        body={
            "challenge": to_hex(challenge.nonce),
            "envelope": delivery_envelope.to_wire(),
        },
    )
    channel.send(verifier.name, "adversary", delivery)

    # Sealed to the enrolled device key; the adversary cannot open it
    # and does not need to.
    if config.mitigation:
        fake_lkp = generate_keypair(KeyRole.LKP, rng)
        body = mitigated_local_proof(
            fake_lkp, public_document, challenge.nonce, match_accepted=True
        )
    else:
        body = spoof_local_proof(public_document, challenge.nonce)
    proof = ProtocolMessage(
        kind=MessageKind.HMAC_PROOF,
        session_id=session_id,
        sender="adversary",
        body=body,
    )
    proof = channel.send("adversary", verifier.name, proof)
    outcome = handle_hmac_proof(
        verifier, document, proof.body, channel.now, config.mitigation
    )
    result = ProtocolMessage(
        kind=MessageKind.AUTH_RESULT,
        session_id=session_id,
        sender=verifier.name,
        body=outcome.to_wire(),
    )
    channel.send(verifier.name, "adversary", result)
    return outcome


def run_scenario(
    config: SimulationConfig, transcript_path: str | None = None
) -> ScenarioResult:
    """Enroll, run one authentication under the configured adversary."""
    config.validate()
    world = build_world(config)
    clock, transcript = LogicalClock(), Transcript()
    adversary: Adversary
    if config.adversary == "mitm-observe":
        adversary = MitmObserveAdversary()
    elif config.adversary == "replay":
        adversary = ReplayAdversary()
    else:
        adversary = Adversary()
    channel = Channel(
        clock, transcript, adversary=adversary, tick_budget=config.tick_budget
    )
    transcript.note(
        0, "harness", {"event": "scenario-start", "config": config.to_note()}
    )

    enrollment = _enroll_in_world(config, world, channel)
    ibv = _scenario_ibv(config)
    candidate = _scenario_candidate(config, ibv)

    if config.adversary == "tamper-hub":
        _tamper_hubs(config, world, enrollment)

    auth_rng = derive_rng(config.seed, "auth")
    if config.adversary == "share-spoof":
        outcome = _spoof_attempt(config, world, channel, enrollment)
    else:
        if config.mode == "remote":
            outcome = authenticate_remote(
                world.client,
                world.verifier,
                world.ledger,
                world.hubs,
                candidate,
                auth_rng,
                channel=channel,
                include_local_share=config.include_local_share,
                threshold=config.threshold,
                challenge_lifetime=config.challenge_lifetime,
            )
        else:
            outcome = authenticate_local(
                world.client,
                world.verifier,
                world.ledger,
                world.hubs,
                candidate,
                auth_rng,
                channel=channel,
                mitigation=config.mitigation,
                threshold=config.threshold,
                challenge_lifetime=config.challenge_lifetime,
            )
        if config.adversary == "replay":
            assert isinstance(adversary, ReplayAdversary)
            assert adversary.captured is not None
            outcome = _replay_attempt(
                config, world, channel, adversary.captured, enrollment
            )

    gc_challenges(world.verifier, channel.now)
    transcript.note(
        clock.tick,
        "harness",
        {"event": "scenario-end", "outcome": outcome.to_wire()},
    )
    data = transcript.to_bytes()
    if transcript_path is not None:
        transcript.write(transcript_path)
    observed = adversary.observed if isinstance(adversary, MitmObserveAdversary) else []
    return ScenarioResult(
        config=config,
        outcome=outcome,
        enrollment=enrollment,
        did=enrollment.did,
        transcript=data,
        wire_log=channel.wire_log,
        observed=observed,
        needles=_collect_needles(world, ibv, candidate, enrollment),
        world=world,
    )


def leaks_needles(wire_items: list[dict], needles: list[bytes]) -> bool:
    """True if any secret appears in the wire items, in any encoding.

    Checks decoded hex and base64 leaves for raw needle bytes, and the
    canonical text itself for hex or base64 spellings of the needles.
    """
    blobs: list[bytes] = []
    for item in wire_items:
        blobs.extend(iter_binary_fields(item))
        blobs.append(canonical_bytes(item))
    expanded: list[bytes] = []
    for needle in needles:
        expanded.append(needle)
        expanded.append(to_hex(needle).encode("ascii"))
        expanded.append(to_b64(needle).encode("ascii"))
    return contains_needle(blobs, expanded)


def transcript_wire_items(transcript: bytes) -> list[dict]:
    """Every JSON object logged to a transcript, one per line."""
    items: list[dict] = []
    for line in transcript.splitlines():
        items.append(from_canonical_bytes(line))
    return items


@dataclass(frozen=True)
class ErrorRates:
    trials: int
    genuine_rejects: int
    impostor_accepts: int
    genuine_distances: tuple[float, ...] = field(repr=False, default=())
    impostor_distances: tuple[float, ...] = field(repr=False, default=())
    vector_length: int = DEFAULT_LENGTH
    threshold: float = DEFAULT_THRESHOLD
    genuine_flip_prob: float = DEFAULT_GENUINE_FLIP_PROB

    @property
    def frr(self) -> float:
        return self.genuine_rejects / self.trials if self.trials else 0.0

    @property
    def far(self) -> float:
        return self.impostor_accepts / self.trials if self.trials else 0.0


def compute_error_rates(
    trials: int,
    seed: int = 42,
    vector_length: int = DEFAULT_LENGTH,
    threshold: float = DEFAULT_THRESHOLD,
    genuine_flip_prob: float = DEFAULT_GENUINE_FLIP_PROB,
) -> ErrorRates:
    """Empirical FRR/FAR over full server-matching authentications.

    One enrollment is reused; every trial runs the complete flow with a
    fresh challenge, once with a genuine capture and once with an
    impostor capture.
    """
    if trials <= 0:
        raise ConfigurationError("trials must be positive")
    config = SimulationConfig(
        seed=seed,
        vector_length=vector_length,
        threshold=threshold,
        genuine_flip_prob=genuine_flip_prob,
        tick_budget=max(DEFAULT_TICK_BUDGET, 16 * trials),
        challenge_lifetime=max(100, 32 * trials),
    )
    world = build_world(config)
    clock, transcript = LogicalClock(), Transcript()
    channel = Channel(clock, transcript, tick_budget=config.tick_budget)
    _enroll_in_world(config, world, channel)
    # Transcribing tens of thousands of messages has no reader; log the
    # enrollment, then let auth traffic flow without recording.
    channel.transcript = Transcript()
    channel.wire_log = []

    ibv = _scenario_ibv(config)
    genuine_rejects = 0
    impostor_accepts = 0
    genuine_distances: list[float] = []
    impostor_distances: list[float] = []
    for trial in range(trials):
        genuine = derive_cbv(
            ibv, genuine_flip_prob, derive_rng(seed, f"rates-genuine:{trial}")
        )
        outcome = authenticate_remote(
            world.client,
            world.verifier,
            world.ledger,
            world.hubs,
            genuine,
            derive_rng(seed, f"rates-genuine-auth:{trial}"),
            channel=channel,
            threshold=threshold,
            challenge_lifetime=config.challenge_lifetime,
        )
        if not outcome.accepted:
            genuine_rejects += 1
        genuine_distances.append(match_vectors(ibv, genuine, threshold).distance)

        impostor = generate_ibv(
            derive_rng(seed, f"rates-impostor:{trial}"), vector_length
        )
        outcome = authenticate_remote(
            world.client,
            world.verifier,
            world.ledger,
            world.hubs,
            impostor,
            derive_rng(seed, f"rates-impostor-auth:{trial}"),
            channel=channel,
            threshold=threshold,
            challenge_lifetime=config.challenge_lifetime,
        )
        if outcome.accepted:
            impostor_accepts += 1
        impostor_distances.append(match_vectors(ibv, impostor, threshold).distance)

        if trial % 512 == 511:
            gc_challenges(world.verifier, channel.now)

    return ErrorRates(
        trials=trials,
        genuine_rejects=genuine_rejects,
        impostor_accepts=impostor_accepts,
        genuine_distances=tuple(genuine_distances),
        impostor_distances=tuple(impostor_distances),
        vector_length=vector_length,
        threshold=threshold,
        genuine_flip_prob=genuine_flip_prob,
    )


def verify_ledger_file(path: str) -> bool:
    with open(path, "rb") as handle:
        return verify_export(handle.read())
