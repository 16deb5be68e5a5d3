"""SimdBackend implementation over the lattice scheme in `bgv`.

Handles carry `RlweCiphertext` payloads. Slot-domain handles use N' = N/2
slots; coefficient-domain handles (the single-product matvec path) report
`slot_count == ring_degree` since all N coefficients are addressable.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Sequence

import numpy as np

from .. import counters
from ..errors import KeyMismatch, LevelExhausted, SlotCountMismatch
from ..fixedpoint import center
from ..params import SchemeParams
from ..simd import CiphertextHandle, Plaintext, SimdBackend
from .bgv import KeyMaterial, LweCiphertext, RlweCiphertext


class RlweBackend(SimdBackend):
    backend_id = "rlwe"

    def __init__(self, params: SchemeParams, seed: int = 2024):
        super().__init__(params)
        self._rng = np.random.default_rng(seed)
        self._keys: dict[int, KeyMaterial] = {}

    def _key(self, key_id: int) -> KeyMaterial:
        try:
            return self._keys[key_id]
        except KeyError:
            raise KeyMismatch(f"unknown key id {key_id}") from None

    def keygen(self, rot_offsets: Iterable[int] | None = None) -> int:
        km = KeyMaterial(self.params, rot_offsets or (), self._rng)
        self._keys[km.key_id] = km
        return km.key_id

    # -- slot-domain ---------------------------------------------------------
    def encrypt(self, pt: Plaintext, key_id: int) -> CiphertextHandle:
        km = self._key(key_id)
        ct = km.encrypt_poly(km.slots_to_poly(pt.slots), self._rng)
        return CiphertextHandle(
            backend_id=self.backend_id,
            payload=ct,
            level=self.params.max_mult_level,
            scale_exponent=pt.scale_exponent,
            slot_count=self.params.slot_count,
            key_id=key_id,
        )

    def decrypt(self, ct: CiphertextHandle) -> Plaintext:
        km = self._key(ct.key_id)
        if ct.payload.coeff_domain_plaintext:
            raise SlotCountMismatch("coefficient-domain handle; use decrypt_coeff")
        return Plaintext(km.poly_to_slots(km.decrypt_poly(ct.payload)), ct.scale_exponent)

    def o1_add(self, a, b):
        self._add_preconditions(a, b)
        km = self._key(b.key_id)
        if isinstance(a, CiphertextHandle):
            payload = km.add(a.payload, b.payload)
            level = min(a.level, b.level)
        else:
            payload = km.add_plain(km.slots_to_poly(a.slots), b.payload)
            level = b.level
        counters.record_op("add")
        return replace(b, payload=payload, level=level, replication=None)

    def o2_mult(self, a: Plaintext, b: CiphertextHandle) -> CiphertextHandle:
        if b.level < 1:
            raise LevelExhausted("ciphertext has no multiplication level left")
        if len(a.slots) != b.slot_count:
            raise SlotCountMismatch(f"{len(a.slots)} != {b.slot_count}")
        km = self._key(b.key_id)
        payload = km.mult_plain(km.slots_to_poly(a.slots), b.payload)
        counters.record_op("mult")
        return replace(
            b,
            payload=payload,
            level=b.level - 1,
            scale_exponent=a.scale_exponent + b.scale_exponent,
            replication=None,
        )

    def o3_rot(self, c: CiphertextHandle, i: int, direction: str = "left") -> CiphertextHandle:
        self._check_offset(i)
        left = self._left_amount(i, direction, self.params.slot_count)
        km = self._key(c.key_id)
        payload = km.rotate(c.payload, left)
        counters.record_op("rot")
        return replace(c, payload=payload, replication=None)

    def o4_hst_rot_many(self, c, offsets: Sequence[int], direction: str = "left"):
        self._check_offsets(offsets)
        km = self._key(c.key_id)
        lefts = [self._left_amount(i, direction, self.params.slot_count) for i in offsets]
        digits = km.hoist_precompute(c.payload)
        counters.record_op("hst_rot", len(offsets))
        return [
            replace(c, payload=km.apply_rotation(c.payload, digits, left), replication=None)
            for left in lefts
        ]

    # -- coefficient-domain (single-product matvec path) ----------------------
    def encrypt_coeff(self, coeffs: np.ndarray, key_id: int,
                      scale_exponent: int = 1) -> CiphertextHandle:
        km = self._key(key_id)
        poly = np.zeros(self.params.ring_degree, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.int64) % self.params.plain_modulus
        poly[: len(coeffs)] = coeffs
        ct = km.encrypt_poly(poly, self._rng, coeff_domain=True)
        return CiphertextHandle(
            backend_id=self.backend_id,
            payload=ct,
            level=self.params.max_mult_level,
            scale_exponent=scale_exponent,
            slot_count=self.params.ring_degree,
            key_id=key_id,
        )

    def coeff_mult_plain(self, coeffs: np.ndarray, ct: CiphertextHandle) -> CiphertextHandle:
        if ct.level < 1:
            raise LevelExhausted("ciphertext has no multiplication level left")
        km = self._key(ct.key_id)
        poly = np.zeros(self.params.ring_degree, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.int64) % self.params.plain_modulus
        poly[: len(coeffs)] = coeffs
        counters.record_op("mult")
        return replace(
            ct,
            payload=km.mult_plain(poly, ct.payload),
            level=ct.level - 1,
            scale_exponent=ct.scale_exponent + 1,
            replication=None,
        )

    def decrypt_coeff(self, ct: CiphertextHandle) -> np.ndarray:
        return self._key(ct.key_id).decrypt_poly(ct.payload)

    def extract_lwe(self, ct: CiphertextHandle, index: int) -> LweCiphertext:
        return self._key(ct.key_id).extract_lwe(ct.payload, index, ct.scale_exponent)

    def decrypt_lwe(self, lwe: LweCiphertext) -> int:
        value = self._key(lwe.key_id).decrypt_lwe(lwe)
        return int(center(np.array([value]), self.params.plain_modulus)[0])
