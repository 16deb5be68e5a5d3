"""Vectorized negacyclic number-theoretic transforms.

Transforms work over Z_p[X]/(X^N + 1) for p == 1 (mod 2N). The forward
transform returns evaluations in natural order,

    ntt(a)[j] = a(psi^(2j+1))   for j = 0..N-1,

where psi is a fixed primitive 2N-th root of unity mod p. That ordering is
what the slot layout and Galois permutations in `bgv` rely on, so it is part
of this module's contract, not an implementation detail.

Moduli below 2**31 take the direct int64 product path; larger moduli (up to
2**40, used for plaintext-side transforms) go through a 20-bit limb split.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import BadModulus

_LIMB = 20
_MASK = (1 << _LIMB) - 1

# deterministic Miller-Rabin witness set, valid for all n < 2**64
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def find_ntt_prime(bits: int, two_n: int) -> int:
    """Largest prime p < 2**bits with p == 1 (mod two_n)."""
    k = ((1 << bits) - 1) // two_n
    while k > 0:
        p = k * two_n + 1
        if is_prime(p):
            return p
        k -= 1
    raise BadModulus(f"no prime below 2**{bits} congruent to 1 mod {two_n}")


def rns_primes(count: int, two_n: int, bits: int = 31) -> tuple[int, ...]:
    """`count` distinct NTT-friendly primes just below 2**bits."""
    primes: list[int] = []
    k = ((1 << bits) - 1) // two_n
    while len(primes) < count and k > 0:
        p = k * two_n + 1
        if is_prime(p):
            primes.append(p)
        k -= 1
    if len(primes) < count:
        raise BadModulus(f"could not find {count} primes == 1 mod {two_n}")
    return tuple(primes)


def _find_root_2n(p: int, n: int) -> int:
    """Element of order exactly 2N in Z_p* (requires 2N | p-1)."""
    for h in range(2, 1000):
        g = pow(h, (p - 1) // (2 * n), p)
        if pow(g, n, p) == p - 1:
            return g
    raise BadModulus(f"no 2N-th root of unity found mod {p}")


def _powers(base: int, count: int, p: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    acc = 1
    for i in range(count):
        out[i] = acc
        acc = acc * base % p
    return out


class NttContext:
    def __init__(self, p: int, n: int):
        if n & (n - 1) or n < 2:
            raise BadModulus(f"ring degree {n} not a power of two")
        if (p - 1) % (2 * n):
            raise BadModulus(f"{p} != 1 (mod {2 * n}); batching congruence fails")
        self.p = p
        self.n = n
        self.fast = p < (1 << 31)
        psi = _find_root_2n(p, n)
        ipsi = pow(psi, -1, p)
        omega = psi * psi % p
        iomega = pow(omega, -1, p)
        self.psi_pows = _powers(psi, n, p)
        self.ipsi_pows = _powers(ipsi, n, p)
        self.n_inv = pow(n, -1, p)
        # per-stage twiddle tables for the cyclic DFT (decimation in time)
        self._stages = []
        self._stages_inv = []
        logn = n.bit_length() - 1
        for s in range(1, logn + 1):
            half = 1 << (s - 1)
            w = pow(omega, n >> s, p)
            iw = pow(iomega, n >> s, p)
            self._stages.append(self._prep(_powers(w, half, p)))
            self._stages_inv.append(self._prep(_powers(iw, half, p)))
        # bit-reversal permutation
        rev = np.zeros(n, dtype=np.int64)
        for i in range(1, n):
            rev[i] = rev[i >> 1] >> 1 | ((i & 1) << (logn - 1))
        self._rev = rev

    def _prep(self, w: np.ndarray):
        # keep (w, w_hi, w_lo); limb halves unused on the fast path
        return (w, w >> _LIMB, w & _MASK)

    def _mul_table(self, a: np.ndarray, table) -> np.ndarray:
        w, w_hi, w_lo = table
        if self.fast:
            return a * w % self.p
        return (((a * w_hi % self.p) << _LIMB) + a * w_lo) % self.p

    def mul(self, a, b) -> np.ndarray:
        """Pointwise a*b mod p, overflow-safe for both modulus regimes."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.fast:
            return a * b % self.p
        return (((a * (b >> _LIMB) % self.p) << _LIMB) + a * (b & _MASK)) % self.p

    def _dft(self, x: np.ndarray, stages) -> np.ndarray:
        batch = x.shape[0]
        x = x[:, self._rev]
        for s, table in enumerate(stages, start=1):
            m = 1 << s
            half = m >> 1
            x = x.reshape(batch, self.n // m, m)
            lo = x[:, :, :half]
            hi = self._mul_table(x[:, :, half:], table)
            x = np.concatenate(((lo + hi) % self.p, (lo - hi) % self.p), axis=2)
        return x.reshape(batch, self.n)

    def ntt(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        squeeze = a.ndim == 1
        x = self.mul(np.atleast_2d(a), self.psi_pows)
        out = self._dft(x, self._stages)
        return out[0] if squeeze else out

    def intt(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        squeeze = a.ndim == 1
        x = self._dft(np.atleast_2d(a) % self.p, self._stages_inv)
        out = self.mul(self.mul(x, self.ipsi_pows), self.n_inv)
        return out[0] if squeeze else out

    def negacyclic_mult(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.intt(self.mul(self.ntt(a), self.ntt(b)))


@lru_cache(maxsize=None)
def get_ntt_context(p: int, n: int) -> NttContext:
    return NttContext(p, n)
