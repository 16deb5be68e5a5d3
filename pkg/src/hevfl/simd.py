"""SIMD ciphertext interface and the exact cleartext-simulation backend.

The four basic ops:

  O1 add          slot-wise addition (plain+cipher or cipher+cipher)
  O2 mult         slot-wise multiplication (plain * cipher), burns one level
  O3 rot          cyclic slot rotation; RotL(x, i)[j] = x[(j + i) mod N']
  O4 hst_rot_many several rotations of ONE ciphertext sharing precomputation

The semantic backend stores slot vectors mod t directly, so any program built
from these ops decodes to exactly the same program applied to cleartext
integers mod t. It still enforces level budgets, scale bookkeeping, slot
counts and key tags, making it a drop-in twin for the lattice backend in
every test that does not probe noise.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import counters
from .errors import (
    IndexOutOfRange,
    KeyMismatch,
    LevelExhausted,
    MissingGaloisKey,
    OffsetOutOfRange,
    ScaleMismatch,
    SlotCountMismatch,
    VectorTooLong,
)
from .fixedpoint import center, from_fixed, mulmod, to_fixed
from .params import SchemeParams

_key_counter = itertools.count(1)


@dataclass
class Plaintext:
    """Encoded slot vector (length exactly N') with its scale exponent."""

    slots: np.ndarray
    scale_exponent: int = 1

    def __post_init__(self):
        self.slots = np.asarray(self.slots, dtype=np.int64)


@dataclass
class ScalarCiphertext:
    """Semantic-backend stand-in for a single extracted coefficient."""

    value_mod_t: int
    key_id: int
    scale_exponent: int


@dataclass
class CiphertextHandle:
    """Opaque ciphertext with level / scale / key bookkeeping.

    `replication` optionally tags how the encrypted vector was laid out
    (checked by matmult entry points, dropped on derived ciphertexts).
    """

    backend_id: str
    payload: object
    level: int
    scale_exponent: int
    slot_count: int
    key_id: int
    replication: tuple | None = None


class SimdBackend(ABC):
    backend_id: str

    def __init__(self, params: SchemeParams):
        self.params = params

    # -- encoding ----------------------------------------------------------
    def encode(self, values: Sequence[float]) -> Plaintext:
        """Fixed-point encode at scale delta into the N' slots (zero padded)."""
        values = np.atleast_1d(np.asarray(values, dtype=np.float64))
        n = self.params.slot_count
        if len(values) > n:
            raise VectorTooLong(f"{len(values)} values > {n} slots")
        slots = np.zeros(n, dtype=np.int64)
        if len(values):
            slots[: len(values)] = to_fixed(values, self.params.scale, self.params.plain_modulus)
        return Plaintext(slots, scale_exponent=1)

    def encode_raw(self, slots: Sequence[int], scale_exponent: int) -> Plaintext:
        """Encode already-scaled integer residues (e.g. masks, secret shares)."""
        slots = np.asarray(slots, dtype=np.int64) % self.params.plain_modulus
        n = self.params.slot_count
        if len(slots) > n:
            raise VectorTooLong(f"{len(slots)} values > {n} slots")
        out = np.zeros(n, dtype=np.int64)
        out[: len(slots)] = slots
        return Plaintext(out, scale_exponent=scale_exponent)

    def decode(self, pt: Plaintext) -> np.ndarray:
        return from_fixed(pt.slots, self.params.scale, self.params.plain_modulus, pt.scale_exponent)

    def decode_int(self, pt: Plaintext) -> np.ndarray:
        return center(pt.slots, self.params.plain_modulus)

    # -- keys & encryption --------------------------------------------------
    @abstractmethod
    def keygen(self, rot_offsets: Iterable[int] | None = None) -> int:
        """Create key material; returns a key id. `rot_offsets` lists the
        left-rotation amounts the keys must support (None = unrestricted
        where the backend allows it)."""

    @abstractmethod
    def encrypt(self, pt: Plaintext, key_id: int) -> CiphertextHandle:
        ...

    @abstractmethod
    def decrypt(self, ct: CiphertextHandle) -> Plaintext:
        ...

    # -- the four ops --------------------------------------------------------
    @abstractmethod
    def o1_add(self, a: Plaintext | CiphertextHandle, b: CiphertextHandle) -> CiphertextHandle:
        ...

    @abstractmethod
    def o2_mult(self, a: Plaintext, b: CiphertextHandle) -> CiphertextHandle:
        ...

    @abstractmethod
    def o3_rot(self, c: CiphertextHandle, i: int, direction: str = "left") -> CiphertextHandle:
        ...

    @abstractmethod
    def o4_hst_rot_many(
        self, c: CiphertextHandle, offsets: Sequence[int], direction: str = "left"
    ) -> list[CiphertextHandle]:
        ...

    # -- shared precondition helpers -----------------------------------------
    def _check_offset(self, i: int) -> None:
        if not 0 <= i < self.params.slot_count:
            raise OffsetOutOfRange(f"offset {i} outside [0, {self.params.slot_count})")

    def _check_offsets(self, offsets: Sequence[int]) -> None:
        for i in offsets:
            self._check_offset(i)
        if len(set(offsets)) != len(offsets):
            raise OffsetOutOfRange(f"duplicate offsets in {list(offsets)}")

    @staticmethod
    def _left_amount(i: int, direction: str, n: int) -> int:
        if direction == "left":
            return i % n
        if direction == "right":
            return (-i) % n
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")

    def _add_preconditions(self, a, b: CiphertextHandle) -> None:
        if a.scale_exponent != b.scale_exponent:
            raise ScaleMismatch(f"{a.scale_exponent} != {b.scale_exponent}")
        a_slots = a.slot_count if isinstance(a, CiphertextHandle) else len(a.slots)
        if a_slots != b.slot_count:
            raise SlotCountMismatch(f"{a_slots} != {b.slot_count}")
        if isinstance(a, CiphertextHandle) and a.key_id != b.key_id:
            raise KeyMismatch("cannot add ciphertexts under different keys")


class SemanticBackend(SimdBackend):
    """Slot vectors mod t with exact bookkeeping; no actual encryption."""

    backend_id = "semantic"

    def __init__(self, params: SchemeParams):
        super().__init__(params)
        self._keys: dict[int, frozenset[int] | None] = {}

    def keygen(self, rot_offsets: Iterable[int] | None = None) -> int:
        key_id = next(_key_counter)
        self._keys[key_id] = None if rot_offsets is None else frozenset(rot_offsets)
        return key_id

    def encrypt(self, pt: Plaintext, key_id: int) -> CiphertextHandle:
        if key_id not in self._keys:
            raise KeyMismatch(f"unknown key id {key_id}")
        return CiphertextHandle(
            backend_id=self.backend_id,
            payload=pt.slots.copy(),
            level=self.params.max_mult_level,
            scale_exponent=pt.scale_exponent,
            slot_count=self.params.slot_count,
            key_id=key_id,
        )

    def decrypt(self, ct: CiphertextHandle) -> Plaintext:
        if ct.key_id not in self._keys:
            raise KeyMismatch(f"unknown key id {ct.key_id}")
        return Plaintext(ct.payload.copy(), scale_exponent=ct.scale_exponent)

    def o1_add(self, a, b):
        self._add_preconditions(a, b)
        t = self.params.plain_modulus
        if isinstance(a, CiphertextHandle):
            slots = (a.payload + b.payload) % t
            level = min(a.level, b.level)
        else:
            slots = (a.slots + b.payload) % t
            level = b.level
        counters.record_op("add")
        return replace(b, payload=slots, level=level, replication=None)

    def o2_mult(self, a: Plaintext, b: CiphertextHandle) -> CiphertextHandle:
        if b.level < 1:
            raise LevelExhausted("ciphertext has no multiplication level left")
        if len(a.slots) != b.slot_count:
            raise SlotCountMismatch(f"{len(a.slots)} != {b.slot_count}")
        t = self.params.plain_modulus
        slots = mulmod(a.slots, b.payload, t)
        counters.record_op("mult")
        return replace(
            b,
            payload=slots,
            level=b.level - 1,
            scale_exponent=a.scale_exponent + b.scale_exponent,
            replication=None,
        )

    def _rotated(self, ct: CiphertextHandle, left: int) -> CiphertextHandle:
        return replace(ct, payload=np.roll(ct.payload, -left), replication=None)

    def _check_key_offset(self, ct: CiphertextHandle, left: int) -> None:
        allowed = self._keys.get(ct.key_id)
        if allowed is not None and left % self.params.slot_count != 0 and left not in allowed:
            raise MissingGaloisKey(f"left offset {left} not registered at keygen")

    def o3_rot(self, c, i, direction="left"):
        self._check_offset(i)
        left = self._left_amount(i, direction, self.params.slot_count)
        self._check_key_offset(c, left)
        counters.record_op("rot")
        return self._rotated(c, left)

    def o4_hst_rot_many(self, c, offsets, direction="left"):
        self._check_offsets(offsets)
        lefts = [self._left_amount(i, direction, self.params.slot_count) for i in offsets]
        for left in lefts:
            self._check_key_offset(c, left)
        counters.record_op("hst_rot", len(offsets))
        return [self._rotated(c, left) for left in lefts]

    # -- coefficient-domain (single-product matvec path) ----------------------
    def _coeff_vec(self, coeffs: Sequence[int]) -> np.ndarray:
        poly = np.zeros(self.params.ring_degree, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.int64) % self.params.plain_modulus
        poly[: len(coeffs)] = coeffs
        return poly

    def encrypt_coeff(self, coeffs: Sequence[int], key_id: int,
                      scale_exponent: int = 1) -> CiphertextHandle:
        if key_id not in self._keys:
            raise KeyMismatch(f"unknown key id {key_id}")
        return CiphertextHandle(
            backend_id=self.backend_id,
            payload=self._coeff_vec(coeffs),
            level=self.params.max_mult_level,
            scale_exponent=scale_exponent,
            slot_count=self.params.ring_degree,
            key_id=key_id,
        )

    def coeff_mult_plain(self, coeffs: Sequence[int], ct: CiphertextHandle) -> CiphertextHandle:
        if ct.level < 1:
            raise LevelExhausted("ciphertext has no multiplication level left")
        prod = _negacyclic_mulmod(self._coeff_vec(coeffs), ct.payload,
                                  self.params.plain_modulus)
        counters.record_op("mult")
        return replace(
            ct,
            payload=prod,
            level=ct.level - 1,
            scale_exponent=ct.scale_exponent + 1,
            replication=None,
        )

    def decrypt_coeff(self, ct: CiphertextHandle) -> np.ndarray:
        if ct.key_id not in self._keys:
            raise KeyMismatch(f"unknown key id {ct.key_id}")
        return ct.payload.copy()

    def extract_lwe(self, ct: CiphertextHandle, index: int) -> ScalarCiphertext:
        if not 0 <= index < self.params.ring_degree:
            raise IndexOutOfRange(
                f"coefficient index {index} outside [0, {self.params.ring_degree})"
            )
        return ScalarCiphertext(int(ct.payload[index]), ct.key_id, ct.scale_exponent)

    def decrypt_lwe(self, lwe: ScalarCiphertext) -> int:
        return int(center(np.array([lwe.value_mod_t]), self.params.plain_modulus)[0])


def _negacyclic_mulmod(a: np.ndarray, b: np.ndarray, t: int) -> np.ndarray:
    """a * b mod (X^N + 1, t), exact for any modulus below the int64 limb bound.

    Uses the mod-t transform when t supports it, otherwise a shifted-add
    schoolbook pass over the sparser operand.
    """
    n = len(a)
    if (t - 1) % (2 * n) == 0:
        from .rlwe.ntt import get_ntt_context, is_prime

        if is_prime(t):
            return get_ntt_context(t, n).negacyclic_mult(a, b)
    if np.count_nonzero(b) < np.count_nonzero(a):
        a, b = b, a
    out = np.zeros(n, dtype=np.int64)
    for j in np.nonzero(b)[0]:
        shifted = np.roll(a, j)
        shifted[:j] = -shifted[:j] % t
        out = (out + mulmod(shifted, int(b[j]), t)) % t
    return out
