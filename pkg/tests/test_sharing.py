"""Field arithmetic and both sharing schemes, checked against oracles."""

from itertools import combinations

import pytest

from horcrux.biometrics import BiometricVector, generate_ibv
from horcrux.encoding import derive_rng
from horcrux.errors import ConfigurationError, ReconstructionError
from horcrux.sharing import (
    Scheme,
    Share,
    combine,
    combine_shamir,
    combine_xor,
    gf_add,
    gf_inv,
    gf_mul,
    split_shamir,
    split_xor,
)

from oracles import brute_inverse, lagrange_at_zero, peasant_mul


class StubRng:
    """Feeds predetermined bytes so worked examples are exact."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def randbytes(self, n: int) -> bytes:
        out = self.data[self.offset : self.offset + n]
        self.offset += n
        assert len(out) == n, "stub ran out of bytes"
        return out


def test_gf_mul_matches_peasant_oracle_exhaustively():
    for a in range(256):
        for b in range(256):
            assert gf_mul(a, b) == peasant_mul(a, b)


def test_gf_inverse_matches_brute_force():
    for a in range(1, 256):
        inverse = gf_inv(a)
        assert inverse == brute_inverse(a)
        assert gf_mul(a, inverse) == 1
    with pytest.raises(ZeroDivisionError):
        gf_inv(0)


def test_gf_add_is_xor():
    assert gf_add(0xA5, 0x0F) == 0xAA
    assert gf_add(7, 7) == 0


def test_shamir_worked_example():
    # secret 0x2A with coefficient 0x01: f(x) = 0x2A + x
    shares = split_shamir(BiometricVector.from_bytes(b"\x2a"), 2, 3, StubRng(b"\x01"))
    assert [s.payload for s in shares] == [b"\x2b", b"\x28", b"\x29"]
    for pair in combinations(shares, 2):
        assert combine_shamir(list(pair)).bits == b"\x2a"


def test_xor_worked_example():
    # secret 0xA5, pad 0x0F: masked share 0xAA, pad share 0x0F
    s1, s2 = split_xor(BiometricVector.from_bytes(b"\xa5"), StubRng(b"\x0f"))
    assert s1.payload == b"\xaa"
    assert s2.payload == b"\x0f"
    assert combine_xor(s1, s2).bits == b"\xa5"
    assert combine_xor(s2, s1).bits == b"\xa5"


def test_xor_round_trip_bulk():
    for seed in range(100):
        ibv = generate_ibv(derive_rng(seed, "xr"), 512)
        s1, s2 = split_xor(ibv, derive_rng(seed, "xp"))
        assert combine([s1, s2]).bits == ibv.bits


def test_shamir_every_k_subset_reconstructs():
    for seed in range(20):
        ibv = generate_ibv(derive_rng(seed, "sk"), 256)
        for k, n in ((2, 2), (2, 3), (3, 5), (4, 6)):
            shares = split_shamir(ibv, k, n, derive_rng(seed, f"sp:{k}:{n}"))
            for subset in combinations(shares, k):
                assert combine(list(subset)).bits == ibv.bits
            # more than k shares also reconstructs
            assert combine_shamir(shares).bits == ibv.bits


def test_shamir_reconstruction_matches_lagrange_oracle_all_secrets():
    # every 1-byte secret, shares handed to an independent interpolator
    for secret in range(256):
        ibv = BiometricVector.from_bytes(bytes([secret]))
        shares = split_shamir(ibv, 2, 3, derive_rng(secret, "lo"))
        points = [(share.index, share.payload[0]) for share in shares[:2]]
        assert lagrange_at_zero(points) == secret
        points = [(share.index, share.payload[0]) for share in shares[1:]]
        assert lagrange_at_zero(points) == secret


def test_share_metadata_validation():
    with pytest.raises(ConfigurationError):
        Share(scheme=Scheme.XOR_2OF2, index=3, payload=b"\x00", k=2, n=2)
    with pytest.raises(ConfigurationError):
        Share(scheme=Scheme.XOR_2OF2, index=1, payload=b"\x00", k=2, n=3)
    with pytest.raises(ConfigurationError):
        Share(scheme=Scheme.SHAMIR, index=1, payload=b"\x00", k=1, n=3)
    with pytest.raises(ConfigurationError):
        Share(scheme=Scheme.SHAMIR, index=4, payload=b"\x00", k=2, n=3)
    with pytest.raises(ConfigurationError):
        split_shamir(BiometricVector.from_bytes(b"\x00"), 5, 3, derive_rng(0, "bad"))


def test_combine_rejects_bad_sets():
    ibv = generate_ibv(derive_rng(1, "cb"), 64)
    shares = split_shamir(ibv, 3, 5, derive_rng(1, "cbp"))
    with pytest.raises(ReconstructionError):
        combine_shamir(shares[:2])  # below threshold
    with pytest.raises(ReconstructionError):
        combine_shamir([shares[0], shares[0], shares[1]])  # duplicate index
    with pytest.raises(ReconstructionError):
        combine([])
    s1, s2 = split_xor(ibv, derive_rng(1, "cbx"))
    with pytest.raises(ReconstructionError):
        combine_xor(s1, s1)
    with pytest.raises(ReconstructionError):
        combine_xor(s1, shares[0])
    with pytest.raises(ReconstructionError):
        combine([s1, s2, s2])  # XOR takes exactly two


def test_share_wire_round_trip():
    ibv = generate_ibv(derive_rng(2, "wr"), 128)
    for share in split_shamir(ibv, 2, 3, derive_rng(2, "wrp")):
        assert Share.from_wire(share.to_wire()) == share
    s1, _ = split_xor(ibv, derive_rng(2, "wrx"))
    assert Share.from_wire(s1.to_wire()) == s1


def test_single_share_below_threshold_is_uniformly_consistent():
    # observing one share value rules out no secret: for every index and
    # observed byte there are exactly 256 (secret, coefficient) pairs
    for index in (1, 2, 3):
        for observed in range(256):
            consistent = {
                observed ^ peasant_mul(coeff, index) for coeff in range(256)
            }
            assert len(consistent) == 256
