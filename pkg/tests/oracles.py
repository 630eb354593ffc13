"""Independent oracles the tests check the library against.

Everything here is computed from first principles, deliberately not
sharing code (or technique) with the implementation: bit-by-bit field
multiplication instead of log tables, brute-force inverses instead of
exponent arithmetic, and direct Lagrange interpolation on points.
"""

from scipy.stats import binom

REDUCTION = 0x11B  # x^8 + x^4 + x^3 + x + 1


def peasant_mul(a: int, b: int) -> int:
    """GF(2^8) multiplication by shift-and-add with modular reduction."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        if a & 0x100:
            a ^= REDUCTION
        b >>= 1
    return result


def brute_inverse(a: int) -> int:
    """The multiplicative inverse found by exhaustive search."""
    for candidate in range(1, 256):
        if peasant_mul(a, candidate) == 1:
            return candidate
    raise ValueError(f"{a} has no inverse")


def lagrange_at_zero(points: list[tuple[int, int]]) -> int:
    """Interpolate a polynomial through the points, evaluated at x = 0."""
    total = 0
    for i, (xi, yi) in enumerate(points):
        numerator, denominator = 1, 1
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            numerator = peasant_mul(numerator, xj)
            denominator = peasant_mul(denominator, xi ^ xj)
        weight = peasant_mul(numerator, brute_inverse(denominator))
        total ^= peasant_mul(yi, weight)
    return total


def poly_eval_reference(coefficients: list[int], x: int) -> int:
    """Evaluate sum(c_i * x^i) term by term, constant coefficient first."""
    total = 0
    power = 1
    for coefficient in coefficients:
        total ^= peasant_mul(coefficient, power)
        power = peasant_mul(power, x)
    return total


def hamming_distance_reference(a: bytes, b: bytes) -> float:
    """Fractional Hamming distance computed bit by bit."""
    assert len(a) == len(b)
    differing = 0
    for byte_a, byte_b in zip(a, b):
        for bit in range(8):
            if (byte_a >> bit) & 1 != (byte_b >> bit) & 1:
                differing += 1
    return differing / (8 * len(a))


def prob_genuine_reject(length: int, flip_prob: float, threshold: float) -> float:
    """P[a genuine capture lands beyond the threshold], binomial tail."""
    cutoff = int(threshold * length)  # reject iff flips > cutoff
    return float(binom.sf(cutoff, length, flip_prob))


def prob_impostor_accept(length: int, threshold: float) -> float:
    """P[an independent random capture lands inside the threshold]."""
    cutoff = int(threshold * length)  # accept iff differing bits <= cutoff
    return float(binom.cdf(cutoff, length, 0.5))
