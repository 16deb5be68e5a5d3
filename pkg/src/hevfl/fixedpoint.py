"""Fixed-point encoding over Z_t and overflow-safe vectorized modular products.

All plain moduli in this package stay below 2**40 so that the product of a
residue with a 20-bit limb fits comfortably in int64; `mulmod` exploits that
to give exact vectorized a*b mod t without object arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import OverflowAtScale

MAX_PLAIN_MODULUS_BITS = 40

_LIMB = 20  # split multiplier into 20-bit limbs


def mulmod(a, b, t: int):
    """Exact (a * b) % t for int64 arrays/scalars, t < 2**40."""
    a = np.asarray(a, dtype=np.int64) % t
    b = np.asarray(b, dtype=np.int64) % t
    b_hi = b >> _LIMB
    b_lo = b & ((1 << _LIMB) - 1)
    hi = (a * b_hi) % t          # < 2**40 * 2**20 = 2**60, safe
    return ((hi << _LIMB) + a * b_lo) % t


def center(v, t: int) -> np.ndarray:
    """Map residues [0, t) to centered representatives [-t/2, t/2)."""
    v = np.asarray(v, dtype=np.int64) % t
    return np.where(v >= (t + 1) // 2, v - t, v)


def to_fixed(values, delta: int, t: int) -> np.ndarray:
    """Round real values to integers at scale delta, reduced mod t.

    Raises OverflowAtScale when any |v*delta| >= t/2, i.e. the value cannot
    be represented without wrapping.
    """
    arr = np.asarray(values, dtype=np.float64)
    scaled = np.rint(arr * delta)
    if scaled.size and np.max(np.abs(scaled)) >= t / 2:
        raise OverflowAtScale(
            f"value {arr.flat[int(np.argmax(np.abs(scaled)))]} does not fit "
            f"modulus {t} at scale {delta}"
        )
    return scaled.astype(np.int64) % t


def from_fixed(residues, delta: int, t: int, scale_exponent: int = 1) -> np.ndarray:
    """Decode centered residues back to floats, dividing by delta**scale_exponent."""
    return center(residues, t).astype(np.float64) / float(delta) ** scale_exponent


def uniform_mod(rng: np.random.Generator, t: int, size) -> np.ndarray:
    """Uniform residues in [0, t) as int64."""
    return rng.integers(0, t, size=size, dtype=np.int64)
