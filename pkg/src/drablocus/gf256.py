"""Arithmetic in GF(2^8) with the AES reduction polynomial.

Every lookup table in the package (S-box image, byte-product image) is
generated from these primitives, so they are deliberately written in the
most transparent form: multiplication is iterated shift-and-reduce, and the
S-box is computed as multiplicative inverse followed by the affine map
rather than transcribed from a table.
"""

from __future__ import annotations

# x^8 + x^4 + x^3 + x + 1
AES_POLY = 0x11B

_BYTE = 0xFF


def gf_add(a: int, b: int) -> int:
    """Field addition: bitwise XOR. Each element is its own inverse."""
    return (a ^ b) & _BYTE


def gf_mul(a: int, b: int) -> int:
    """Field multiplication modulo AES_POLY, by shift-and-conditionally-reduce."""
    a &= _BYTE
    b &= _BYTE
    product = 0
    while b:
        if b & 1:
            product ^= a
        a <<= 1
        if a & 0x100:
            a ^= AES_POLY
        b >>= 1
    return product


def gf_pow(a: int, n: int) -> int:
    """a raised to a non-negative power, by square-and-multiply."""
    result = 1
    base = a & _BYTE
    while n:
        if n & 1:
            result = gf_mul(result, base)
        base = gf_mul(base, base)
        n >>= 1
    return result


def gf_inv(a: int) -> int:
    """Multiplicative inverse; by convention gf_inv(0) == 0.

    The nonzero elements form a group of order 255, so a^254 = a^-1.
    """
    if a & _BYTE == 0:
        return 0
    return gf_pow(a, 254)


def _rotl8(x: int, n: int) -> int:
    n &= 7
    return ((x << n) | (x >> (8 - n))) & _BYTE


def sbox_forward(b: int) -> int:
    """AES S-box: multiplicative inverse, then the standard affine map."""
    x = gf_inv(b)
    return x ^ _rotl8(x, 1) ^ _rotl8(x, 2) ^ _rotl8(x, 3) ^ _rotl8(x, 4) ^ 0x63


def sbox_inverse(b: int) -> int:
    """Inverse S-box: inverse affine map, then multiplicative inverse."""
    x = _rotl8(b, 1) ^ _rotl8(b, 3) ^ _rotl8(b, 6) ^ 0x05
    return gf_inv(x)


# Precomputed 256-entry views, for callers that do bulk substitution.
SBOX = tuple(sbox_forward(b) for b in range(256))
INV_SBOX = tuple(sbox_inverse(b) for b in range(256))
