"""Decentralized biometric authentication: split templates, sealed
credentials, a hash-chained identity ledger, and a deterministic
simulation harness for exercising the flows under adversaries."""

from .biometrics import (
    DEFAULT_GENUINE_FLIP_PROB,
    DEFAULT_LENGTH,
    DEFAULT_THRESHOLD,
    BiometricVector,
    MatchResult,
    derive_cbv,
    generate_ibv,
    match_vectors,
)
from .crypto import (
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
from .errors import (
    AlreadyRegisteredError,
    ChallengeError,
    ChallengeMismatchError,
    ConfigurationError,
    EnvelopeError,
    HorcruxError,
    HubWriteError,
    KeyMismatchError,
    LedgerError,
    NotFoundError,
    ProtocolError,
    ReconstructionError,
    StorageError,
    TagVerificationError,
)
from .harness import (
    ErrorRates,
    ScenarioResult,
    SimulationConfig,
    compute_error_rates,
    leaks_needles,
    load_config,
    parse_config,
    run_enrollment,
    run_scenario,
    verify_ledger_file,
)
from .ledger import Did, Ledger, LedgerRecord, verify_export
from .protocol import (
    AuthMode,
    AuthOutcome,
    ClientState,
    EnrollmentResult,
    FailureReason,
    MessageKind,
    ProtocolMessage,
    ServerState,
    authenticate_local,
    authenticate_remote,
    enroll,
    make_client,
    make_server,
    match_on_device,
    verify_claim,
)
from .sharing import (
    Scheme,
    Share,
    combine,
    combine_shamir,
    combine_xor,
    split_shamir,
    split_xor,
)
from .storage import (
    DidDocument,
    FileHub,
    Hub,
    InMemoryHub,
    ServiceEndpoint,
    StorageRef,
)

__version__ = "0.1.0"
