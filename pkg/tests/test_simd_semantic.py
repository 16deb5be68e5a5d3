"""Semantics of the four SIMD ops on the cleartext-simulation backend."""

import numpy as np
import pytest

from hevfl.errors import (
    KeyMismatch,
    LevelExhausted,
    MissingGaloisKey,
    OffsetOutOfRange,
    ScaleMismatch,
    SlotCountMismatch,
    VectorTooLong,
)
from hevfl.params import semantic_params
from hevfl.simd import Plaintext, SemanticBackend

import oracles
from support import make_semantic


def test_encode_scale_literal():
    """1.5 at scale 2**10 lands on residue 1536 in slot 0."""
    be = SemanticBackend(semantic_params(8, plain_modulus=2**20 + 7, scale=2**10))
    pt = be.encode([1.5])
    assert pt.slots[0] == 1536
    assert all(pt.slots[1:] == 0)


def test_encode_rejects_overlong_vector():
    be, _ = make_semantic(8)
    with pytest.raises(VectorTooLong):
        be.encode(np.ones(9))


def test_encrypt_requires_registered_key():
    be = SemanticBackend(semantic_params(8))
    with pytest.raises(KeyMismatch):
        be.encrypt(be.encode([1.0]), key_id=10**9)


def test_add_and_mult_slotwise(rng):
    be, key = make_semantic(16)
    a = rng.integers(-50, 50, 16).astype(np.float64)
    b = rng.integers(-50, 50, 16).astype(np.float64)
    ct = be.encrypt(be.encode(b), key)

    summed = be.o1_add(be.encode(a), ct)
    np.testing.assert_allclose(be.decode(be.decrypt(summed)), a + b)

    prod = be.o2_mult(be.encode(a), ct)
    np.testing.assert_allclose(be.decode(be.decrypt(prod)), a * b)


def test_add_requires_matching_scale_and_slots():
    be, key = make_semantic(8)
    ct = be.encrypt(be.encode([1.0]), key)
    ct2 = be.o2_mult(be.encode([2.0]), ct)  # now at scale exponent 2
    with pytest.raises(ScaleMismatch):
        be.o1_add(be.encode([1.0]), ct2)
    other = SemanticBackend(semantic_params(16))
    pt16 = other.encode(np.ones(16))
    with pytest.raises(SlotCountMismatch):
        be.o1_add(pt16, ct)


def test_cipher_cipher_add_requires_one_key():
    be, key = make_semantic(8)
    key2 = be.keygen()
    ct1 = be.encrypt(be.encode([1.0]), key)
    ct2 = be.encrypt(be.encode([2.0]), key2)
    with pytest.raises(KeyMismatch):
        be.o1_add(ct1, ct2)


def test_mult_burns_exactly_one_level():
    be, key = make_semantic(8, max_mult_level=1)
    ct = be.encrypt(be.encode([2.0]), key)
    once = be.o2_mult(be.encode([3.0]), ct)
    assert once.level == 0
    with pytest.raises(LevelExhausted):
        be.o2_mult(be.encode([3.0]), once)


def test_rotation_definition_left():
    """RotL(x, i)[j] = x[(j + i) mod N'] for every i, checked slot by slot."""
    be, key = make_semantic(8)
    x = np.arange(1.0, 9.0)
    ct = be.encrypt(be.encode(x), key)
    for i in range(8):
        got = be.decode(be.decrypt(be.o3_rot(ct, i)))
        np.testing.assert_allclose(got, oracles.rot_left(x, i))


def test_rotation_right_direction():
    be, key = make_semantic(8)
    x = np.arange(1.0, 9.0)
    ct = be.encrypt(be.encode(x), key)
    got = be.decode(be.decrypt(be.o3_rot(ct, 3, direction="right")))
    np.testing.assert_allclose(got, oracles.rot_right(x, 3))


def test_rotation_offset_bounds():
    be, key = make_semantic(8)
    ct = be.encrypt(be.encode([1.0]), key)
    with pytest.raises(OffsetOutOfRange):
        be.o3_rot(ct, 8)
    with pytest.raises(OffsetOutOfRange):
        be.o3_rot(ct, -1)


def test_hoisted_single_offset_equals_plain_rotation():
    """hst_rot_many(c, [k]) must agree with o3_rot(c, k) for every k < N'."""
    be, key = make_semantic(8)
    x = np.arange(8.0)
    ct = be.encrypt(be.encode(x), key)
    for k in range(8):
        lone = be.o4_hst_rot_many(ct, [k])
        assert len(lone) == 1
        np.testing.assert_array_equal(
            be.decrypt(lone[0]).slots, be.decrypt(be.o3_rot(ct, k)).slots
        )


def test_hoisted_rejects_duplicate_offsets():
    be, key = make_semantic(8)
    ct = be.encrypt(be.encode([1.0]), key)
    with pytest.raises(OffsetOutOfRange):
        be.o4_hst_rot_many(ct, [1, 1])


def test_restricted_keys_guard_rotations():
    be = SemanticBackend(semantic_params(8))
    key = be.keygen(rot_offsets=[2])
    ct = be.encrypt(be.encode([1.0]), key)
    be.o3_rot(ct, 2)  # registered: fine
    be.o3_rot(ct, 0)  # identity never needs a key
    with pytest.raises(MissingGaloisKey):
        be.o3_rot(ct, 3)
    with pytest.raises(MissingGaloisKey):
        be.o4_hst_rot_many(ct, [2, 3])


def test_ops_preserve_modular_semantics(rng):
    """A chain of all four ops decodes to the same chain on cleartext
    residues mod t — the defining property of the semantic backend."""
    t = 2**20 + 7
    be = SemanticBackend(semantic_params(8, plain_modulus=t, scale=2**10))
    key = be.keygen()
    a = rng.integers(0, t, 8)
    b = rng.integers(0, t, 8)
    c = rng.integers(0, t, 8)

    ct = be.encrypt(be.encode_raw(a, 1), key)
    ct = be.o2_mult(be.encode_raw(b, 1), ct)
    ct = be.o1_add(be.encode_raw(c, 2), ct)
    ct = be.o3_rot(ct, 5)

    want = oracles.rot_left((a * b.astype(object) + c) % t, 5).astype(np.int64)
    np.testing.assert_array_equal(be.decrypt(ct).slots, want)


def test_coeff_product_matches_schoolbook(rng):
    t = 2**20 + 7
    be = SemanticBackend(semantic_params(8, plain_modulus=t, scale=2**10))
    key = be.keygen()
    a = rng.integers(0, t, 16)
    b = rng.integers(0, t, 16)
    ct = be.encrypt_coeff(b, key)
    prod = be.coeff_mult_plain(a, ct)
    np.testing.assert_array_equal(
        be.decrypt_coeff(prod), oracles.schoolbook_negacyclic(a, b, t)
    )


def test_lwe_extraction_returns_one_centered_coefficient():
    be, key = make_semantic(8)
    t = be.params.plain_modulus
    coeffs = np.array([5, t - 3, 0, 7], dtype=np.int64)
    ct = be.encrypt_coeff(coeffs, key)
    assert be.decrypt_lwe(be.extract_lwe(ct, 0)) == 5
    assert be.decrypt_lwe(be.extract_lwe(ct, 1)) == -3  # centered
    from hevfl.errors import IndexOutOfRange

    with pytest.raises(IndexOutOfRange):
        be.extract_lwe(ct, 16)


def test_decrypt_roundtrip_preserves_raw_slots(rng):
    be, key = make_semantic(8)
    t = be.params.plain_modulus
    res = rng.integers(0, t, 8)
    pt = Plaintext(res, scale_exponent=2)
    out = be.decrypt(be.encrypt(pt, key))
    np.testing.assert_array_equal(out.slots, res)
    assert out.scale_exponent == 2
