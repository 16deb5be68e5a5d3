"""Exact integer batching scheme over power-of-two cyclotomics.

Encoding style: lsb plaintext (ciphertexts carry m + t*e), RNS modulus of
~31-bit NTT primes, ternary secrets/noise. There is no ciphertext-ciphertext
multiplication anywhere in this package, so no relinearization machinery —
only plaintext products, additions, and Galois rotations with RNS-digit key
switching.

Slot layout: N' = N/2 slots live on the orbit of 3 in (Z/2N)*; slot k holds
the evaluation at psi^(3^k). The mirror orbit (exponents -3^k) is zero-filled
at encode time and stays zero under every supported op. The automorphism
X -> X^(3^i) then realizes an exact cyclic left rotation by i of the slot
vector, and in the evaluation domain it is a pure index permutation — which
is what makes hoisting (decompose once, permute per offset) work.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import BadModulus, IndexOutOfRange, MissingGaloisKey, ModulusMismatch
from ..fixedpoint import center, mulmod
from ..params import SchemeParams
from .ntt import NttContext, get_ntt_context, is_prime, rns_primes

DEFAULT_RNS_COUNT = 6

_key_ids = itertools.count(1000)


@lru_cache(maxsize=None)
def _rns_modulus(n: int, t: int, count: int) -> "RnsModulus":
    return RnsModulus(rns_primes(count, 2 * n), n, t)


class RnsModulus:
    """A chain of NTT-friendly primes with CRT lift precomputation to Z_t."""

    def __init__(self, primes: tuple[int, ...], n: int, t: int):
        self.primes = tuple(primes)
        self.n = n
        self.t = t
        self.ctxs = tuple(get_ntt_context(p, n) for p in self.primes)
        self.p_arr = np.array(self.primes, dtype=np.int64)
        self.q = 1
        for p in self.primes:
            self.q *= p
        # factors for the centered CRT lift into Z_t (float correction trick)
        inv, c_mod_t, f = [], [], []
        for p in self.primes:
            q_hat = self.q // p
            inv.append(pow(q_hat % p, -1, p))
            c_mod_t.append(q_hat % t)
            f.append(1.0 / p)
        self._inv = np.array(inv, dtype=np.int64)
        self._c_mod_t = np.array(c_mod_t, dtype=np.int64)
        self._f = np.array(f, dtype=np.float64)
        self._q_mod_t = self.q % t
        # RNS gadget: g_j == 1 mod p_j, == 0 mod p_l (l != j); stored mod each prime
        gad = np.zeros((len(primes), len(primes)), dtype=np.int64)
        for j, p in enumerate(self.primes):
            g_j = (self.q // p) * pow((self.q // p) % p, -1, p)
            for l, pl in enumerate(self.primes):
                gad[j, l] = g_j % pl
        self.gadget = gad

    @property
    def k(self) -> int:
        return len(self.primes)

    def sample_uniform(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform element of the RNS ring, one residue row per prime."""
        return np.stack(
            [rng.integers(0, p, size=shape, dtype=np.int64) for p in self.primes]
        )

    def lift_signed(self, coeffs: np.ndarray) -> np.ndarray:
        """Small signed integer coefficients -> residues per prime, shape (k, N)."""
        return np.asarray(coeffs, dtype=np.int64)[None, :] % self.p_arr[:, None]

    def ntt(self, residues: np.ndarray) -> np.ndarray:
        return np.stack([ctx.ntt(residues[l]) for l, ctx in enumerate(self.ctxs)])

    def intt(self, residues: np.ndarray) -> np.ndarray:
        return np.stack([ctx.intt(residues[l]) for l, ctx in enumerate(self.ctxs)])

    def to_mod_t(self, coeff_residues: np.ndarray) -> np.ndarray:
        """Centered representative of the CRT value, reduced mod t.

        Valid while the centered magnitude stays below ~0.49*q, which the
        noise budget guarantees with enormous slack.
        """
        y = coeff_residues * self._inv[:, None] % self.p_arr[:, None]
        wraps = np.rint((y * self._f[:, None]).sum(axis=0)).astype(np.int64)
        acc = np.zeros(coeff_residues.shape[-1], dtype=np.int64)
        for l in range(self.k):
            acc = (acc + mulmod(y[l], int(self._c_mod_t[l]), self.t)) % self.t
        return (acc - wraps * self._q_mod_t) % self.t


@dataclass
class PolyRingElement:
    """Element of Z_q[X]/(X^N+1) in RNS residue rows, shape (k, N)."""

    data: np.ndarray
    domain: str  # "coefficient" | "NTT"
    modulus: RnsModulus

    def to_ntt(self) -> "PolyRingElement":
        if self.domain == "NTT":
            return self
        return PolyRingElement(self.modulus.ntt(self.data), "NTT", self.modulus)

    def to_coeff(self) -> "PolyRingElement":
        if self.domain == "coefficient":
            return self
        return PolyRingElement(self.modulus.intt(self.data), "coefficient", self.modulus)

    def __add__(self, other: "PolyRingElement") -> "PolyRingElement":
        if self.modulus is not other.modulus:
            raise ModulusMismatch("ring elements over different moduli")
        if self.domain != other.domain:
            raise ModulusMismatch("mixed-domain addition")
        return PolyRingElement(
            (self.data + other.data) % self.modulus.p_arr[:, None], self.domain, self.modulus
        )


def ntt_poly_mult(a: PolyRingElement, b: PolyRingElement) -> PolyRingElement:
    """a * b mod (X^N + 1, q) via the transform; coefficient-domain result."""
    if a.modulus is not b.modulus and (
        a.modulus.primes != b.modulus.primes or a.modulus.n != b.modulus.n
    ):
        raise ModulusMismatch("operands use different coefficient moduli")
    an, bn = a.to_ntt(), b.to_ntt()
    prod = np.stack(
        [ctx.mul(an.data[l], bn.data[l]) for l, ctx in enumerate(a.modulus.ctxs)]
    )
    return PolyRingElement(prod, "NTT", a.modulus).to_coeff()


@dataclass
class RlweCiphertext:
    """(c0, c1) in NTT-domain RNS rows; decrypts as c0 + c1*s."""

    c0: np.ndarray
    c1: np.ndarray
    coeff_domain_plaintext: bool = False  # True for coefficient-packed payloads


@dataclass
class LweCiphertext:
    """Extracted single-coefficient ciphertext: b + <a, s> decrypts the value."""

    a: np.ndarray  # (k, N) residues
    b: np.ndarray  # (k,) residues
    key_id: int
    scale_exponent: int


class _GaloisKey:
    __slots__ = ("perm", "ksk0", "ksk1")

    def __init__(self, perm, ksk0, ksk1):
        self.perm = perm
        self.ksk0 = ksk0
        self.ksk1 = ksk1


class KeyMaterial:
    """Secret/public/rotation keys for one key holder. Immutable after keygen."""

    def __init__(self, params: SchemeParams, rot_offsets, rng: np.random.Generator,
                 rns_count: int = DEFAULT_RNS_COUNT):
        n = params.ring_degree
        t = params.plain_modulus
        if params.slot_count * 2 != n:
            raise BadModulus("lattice backend batches N/2 slots; slot_count must be N/2")
        if (t - 1) % (2 * n) != 0 or not is_prime(t):
            raise BadModulus(f"plain modulus {t} is not a prime == 1 (mod {2 * n})")
        self.key_id = next(_key_ids)
        self.params = params
        self.mod = _rns_modulus(n, t, rns_count)
        self.t_ctx = get_ntt_context(t, n)
        # slot k <-> evaluation index (3^k - 1)/2 in the natural-order transform
        idx = np.empty(n // 2, dtype=np.int64)
        e = 1
        for k in range(n // 2):
            idx[k] = (e - 1) // 2
            e = e * 3 % (2 * n)
        self.slot_idx = idx

        mod = self.mod
        self._s_coeff = rng.integers(-1, 2, size=n, dtype=np.int64)
        self.s_ntt = mod.ntt(mod.lift_signed(self._s_coeff))
        a = mod.sample_uniform(rng, n)
        e_pk = mod.ntt(mod.lift_signed(t * rng.integers(-1, 2, size=n, dtype=np.int64)))
        self.pk_a = a
        self.pk_b = (e_pk - self._mul_rows(a, self.s_ntt)) % mod.p_arr[:, None]

        self.galois: dict[int, _GaloisKey] = {}
        for off in sorted(set(rot_offsets or [])):
            off %= params.slot_count
            if off:
                self.galois[off] = self._make_galois(off, rng)

    # -- helpers -------------------------------------------------------------
    def _mul_rows(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.stack([ctx.mul(x[l], y[l]) for l, ctx in enumerate(self.mod.ctxs)])

    def _perm_for(self, galois_element: int) -> np.ndarray:
        n = self.params.ring_degree
        j = np.arange(n, dtype=np.int64)
        return (((2 * j + 1) * galois_element) % (2 * n) - 1) // 2

    def _make_galois(self, left: int, rng: np.random.Generator) -> _GaloisKey:
        mod, n, t = self.mod, self.params.ring_degree, self.params.plain_modulus
        g = pow(3, left, 2 * n)
        perm = self._perm_for(g)
        s_rot = self.s_ntt[:, perm]
        k = mod.k
        ksk0 = np.empty((k, k, n), dtype=np.int64)
        ksk1 = np.empty((k, k, n), dtype=np.int64)
        for j in range(k):
            a_j = mod.sample_uniform(rng, n)
            e_j = mod.ntt(mod.lift_signed(t * rng.integers(-1, 2, size=n, dtype=np.int64)))
            body = (e_j - self._mul_rows(a_j, self.s_ntt)) % mod.p_arr[:, None]
            body = (body + mod.gadget[j][:, None] * s_rot % mod.p_arr[:, None]) % mod.p_arr[:, None]
            ksk0[j] = body
            ksk1[j] = a_j
        return _GaloisKey(perm, ksk0, ksk1)

    # -- plaintext polynomials ------------------------------------------------
    def slots_to_poly(self, slots: np.ndarray) -> np.ndarray:
        """Slot values mod t -> plaintext polynomial mod t (coeff domain)."""
        n = self.params.ring_degree
        ev = np.zeros(n, dtype=np.int64)
        ev[self.slot_idx] = np.asarray(slots, dtype=np.int64) % self.params.plain_modulus
        return self.t_ctx.intt(ev)

    def poly_to_slots(self, poly: np.ndarray) -> np.ndarray:
        return self.t_ctx.ntt(poly)[self.slot_idx]

    def _lift_plain(self, poly_mod_t: np.ndarray) -> np.ndarray:
        """Centered lift of a mod-t polynomial into RNS-NTT form."""
        centered = center(poly_mod_t, self.params.plain_modulus)
        return self.mod.ntt(centered[None, :] % self.mod.p_arr[:, None])

    # -- core scheme ops -------------------------------------------------------
    def encrypt_poly(self, poly_mod_t: np.ndarray, rng: np.random.Generator,
                     coeff_domain: bool = False) -> RlweCiphertext:
        mod, n, t = self.mod, self.params.ring_degree, self.params.plain_modulus
        u = mod.ntt(mod.lift_signed(rng.integers(-1, 2, size=n, dtype=np.int64)))
        m = center(poly_mod_t, t)
        e1 = t * rng.integers(-1, 2, size=n, dtype=np.int64) + m
        e2 = t * rng.integers(-1, 2, size=n, dtype=np.int64)
        c0 = (self._mul_rows(self.pk_b, u) + mod.ntt(mod.lift_signed(e1))) % mod.p_arr[:, None]
        c1 = (self._mul_rows(self.pk_a, u) + mod.ntt(mod.lift_signed(e2))) % mod.p_arr[:, None]
        return RlweCiphertext(c0, c1, coeff_domain)

    def decrypt_poly(self, ct: RlweCiphertext) -> np.ndarray:
        mod = self.mod
        v = (ct.c0 + self._mul_rows(ct.c1, self.s_ntt)) % mod.p_arr[:, None]
        return mod.to_mod_t(mod.intt(v))

    def add(self, a: RlweCiphertext, b: RlweCiphertext) -> RlweCiphertext:
        p = self.mod.p_arr[:, None]
        return RlweCiphertext((a.c0 + b.c0) % p, (a.c1 + b.c1) % p, a.coeff_domain_plaintext)

    def add_plain(self, poly_mod_t: np.ndarray, ct: RlweCiphertext) -> RlweCiphertext:
        p = self.mod.p_arr[:, None]
        return RlweCiphertext(
            (ct.c0 + self._lift_plain(poly_mod_t)) % p, ct.c1.copy(), ct.coeff_domain_plaintext
        )

    def mult_plain(self, poly_mod_t: np.ndarray, ct: RlweCiphertext) -> RlweCiphertext:
        w = self._lift_plain(poly_mod_t)
        return RlweCiphertext(self._mul_rows(w, ct.c0), self._mul_rows(w, ct.c1),
                              ct.coeff_domain_plaintext)

    # -- rotations --------------------------------------------------------------
    def hoist_precompute(self, ct: RlweCiphertext) -> np.ndarray:
        """RNS digit decomposition of c1, transformed once; shape (k, k, N)."""
        mod = self.mod
        k, n = mod.k, self.params.ring_degree
        c1_coeff = mod.intt(ct.c1)
        digits = np.empty((k, k, n), dtype=np.int64)
        for l, ctx in enumerate(mod.ctxs):
            digits[:, l, :] = ctx.ntt(c1_coeff % mod.primes[l])
        return digits

    def apply_rotation(self, ct: RlweCiphertext, digits: np.ndarray, left: int) -> RlweCiphertext:
        if left % self.params.slot_count == 0:
            return RlweCiphertext(ct.c0.copy(), ct.c1.copy(), ct.coeff_domain_plaintext)
        gk = self.galois.get(left)
        if gk is None:
            raise MissingGaloisKey(f"left offset {left} not registered at keygen")
        p3 = self.mod.p_arr[None, :, None]
        d_rot = digits[:, :, gk.perm]
        out0 = (ct.c0[:, gk.perm] + (d_rot * gk.ksk0 % p3).sum(axis=0)) % self.mod.p_arr[:, None]
        out1 = ((d_rot * gk.ksk1 % p3).sum(axis=0)) % self.mod.p_arr[:, None]
        return RlweCiphertext(out0, out1, ct.coeff_domain_plaintext)

    def rotate(self, ct: RlweCiphertext, left: int) -> RlweCiphertext:
        return self.apply_rotation(ct, self.hoist_precompute(ct), left)

    # -- LWE extraction -----------------------------------------------------------
    def extract_lwe(self, ct: RlweCiphertext, index: int, scale_exponent: int) -> LweCiphertext:
        n = self.params.ring_degree
        if not 0 <= index < n:
            raise IndexOutOfRange(f"coefficient index {index} outside [0, {n})")
        mod = self.mod
        c0 = mod.intt(ct.c0)
        c1 = mod.intt(ct.c1)
        j = np.arange(n, dtype=np.int64)
        src = (index - j) % n
        vals = np.take_along_axis(c1, np.broadcast_to(src, (mod.k, n)), axis=1)
        neg = j > index  # wrapped monomials pick up the negacyclic sign
        a = np.where(neg[None, :], (-vals) % mod.p_arr[:, None], vals)
        return LweCiphertext(a=a, b=c0[:, index].copy(), key_id=self.key_id,
                             scale_exponent=scale_exponent)

    def decrypt_lwe(self, lwe: LweCiphertext) -> int:
        mod = self.mod
        s = self._s_coeff[None, :] % mod.p_arr[:, None]
        v = (lwe.b + ((lwe.a * s) % mod.p_arr[:, None]).sum(axis=1)) % mod.p_arr
        value_mod_t = mod.to_mod_t(v[:, None])[0]
        return int(value_mod_t)
