"""Canonical wire encodings and deterministic randomness helpers.

Every object that is digested, signed, or written to a transcript goes
through ``canonical_bytes``: JSON with sorted keys and no whitespace, so
byte equality is well defined across runs and machines.  Binary fields
travel as lowercase hex or standard base64 depending on the field's
declared wire form.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
import random
from typing import Any, Iterable, Iterator


def canonical_bytes(obj: Any) -> bytes:
    """Serialize a JSON-able object to its canonical byte form."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def from_canonical_bytes(raw: bytes) -> Any:
    return json.loads(raw.decode("utf-8"))


def to_hex(data: bytes) -> str:
    return data.hex()


def from_hex(text: str) -> bytes:
    # bytes.fromhex accepts uppercase; canonical form is lowercase only.
    if text != text.lower():
        raise ValueError("non-canonical hex (uppercase digits)")
    return bytes.fromhex(text)


def to_b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def from_b64(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"), validate=True)


def as_rng(seed: int | bytes | str | random.Random) -> random.Random:
    """Accept either a seed or an existing generator.

    Passing a generator lets callers share one deterministic stream across
    several operations; passing a seed gives a fresh, reproducible stream.
    """
    if isinstance(seed, random.Random) or hasattr(seed, "randbytes"):
        return seed
    return random.Random(seed)


def derive_rng(seed: int, label: str) -> random.Random:
    """Derive an independent named substream from a master seed.

    Substreams keyed by label stay stable even if unrelated draws are added
    elsewhere, which keeps transcripts reproducible across code changes.
    """
    material = hashlib.sha256(f"{label}:{seed}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(material, "big"))


def rand_bytes(rng: random.Random, n: int) -> bytes:
    return rng.randbytes(n)


def iter_binary_fields(obj: Any) -> Iterator[bytes]:
    """Yield every byte string recoverable from a wire object.

    Walks a parsed JSON tree and decodes each string leaf that parses as
    hex or base64.  Used by leakage scans: a secret is considered exposed
    if its raw bytes appear in any decodable field or in the serialized
    text itself.
    """
    if isinstance(obj, dict):
        for value in obj.values():
            yield from iter_binary_fields(value)
    elif isinstance(obj, (list, tuple)):
        for value in obj:
            yield from iter_binary_fields(value)
    elif isinstance(obj, str):
        if len(obj) % 2 == 0:
            try:
                yield bytes.fromhex(obj)
            except ValueError:
                pass
        try:
            yield base64.b64decode(obj.encode("ascii"), validate=True)
        except (binascii.Error, ValueError):
            pass


def contains_needle(blobs: Iterable[bytes], needles: Iterable[bytes]) -> bool:
    """True if any needle occurs as a substring of any blob."""
    needle_list = [n for n in needles if n]
    for blob in blobs:
        for needle in needle_list:
            if needle in blob:
                return True
    return False
