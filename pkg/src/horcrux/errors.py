"""Exception hierarchy shared by every layer of the package."""


class HorcruxError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(HorcruxError):
    """Invalid parameter or configuration value (bad length, bad (k, n), bad key)."""


class ProtocolError(HorcruxError):
    """A flow-level contract violation (mismatched lengths, missing state, budget)."""


class ReconstructionError(HorcruxError):
    """Share set cannot be combined: wrong scheme, duplicate or missing shares."""


class ChallengeError(HorcruxError):
    """Challenge is expired, already consumed, or unknown."""


class EnvelopeError(HorcruxError):
    """Base class for sealed-envelope open failures."""


class KeyMismatchError(EnvelopeError):
    """Envelope was sealed for a different recipient key."""


class TagVerificationError(EnvelopeError):
    """Ciphertext or integrity tag fails authentication."""


class ChallengeMismatchError(EnvelopeError):
    """Envelope is bound to a different challenge than expected."""


class LedgerError(HorcruxError):
    """Base class for registry failures."""


class AlreadyRegisteredError(LedgerError):
    """A record with this document digest already exists."""


class NotFoundError(HorcruxError):
    """Lookup failed: unknown identifier or storage key."""


class StorageError(HorcruxError):
    """Hub rejected the operation (bad signature, denied access)."""


class HubWriteError(StorageError):
    """Hub configured (or simulated) as failing refused a write."""
