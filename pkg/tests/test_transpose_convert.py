"""Reusing diagonals of X to build the diagonals of X^T without re-encoding.

The conversion is an exact permutation identity (source diagonal picked by
reflection, then a fixed left rotation), so every test here demands
slot-for-slot equality with encoding the transpose directly.
"""

import numpy as np
import pytest

import oracles
from hevfl import matmult as mm
from hevfl.counters import MeasurementScope
from hevfl.errors import LayoutUnsupported
from support import make_semantic, random_case

A0, A1, B0, B1, C0, C1, D0, D1 = 10, 11, 20, 21, 30, 31, 40, 41
X42 = np.array([[A0, A1], [B0, B1], [C0, C1], [D0, D1]], dtype=np.float64)


def assert_matches_direct_encode(x, params):
    converted = mm.transpose_diag_convert(mm.encode_hoisted_diagonal(x, params))
    direct = mm.encode_hoisted_diagonal(x.T, params)
    assert (converted.m, converted.n) == (direct.m, direct.n)
    assert (converted.orig_m, converted.orig_n) == x.T.shape
    for got, want in zip(converted.diagonals, direct.diagonals):
        np.testing.assert_array_equal(got.slots, want.slots)


def test_square_conversion_equals_direct_encode(rng):
    from hevfl.params import semantic_params

    assert_matches_direct_encode(rng.integers(-8, 9, size=(4, 4)).astype(float),
                                 semantic_params(4, scale=1))


def test_tall_conversion_equals_direct_encode():
    from hevfl.params import semantic_params

    assert_matches_direct_encode(X42, semantic_params(4, scale=1))


def test_wide_conversion_equals_direct_encode(rng):
    from hevfl.params import semantic_params

    assert_matches_direct_encode(rng.integers(-8, 9, size=(2, 4)).astype(float),
                                 semantic_params(4, scale=1))


def test_tall_second_diagonal_literal():
    from hevfl.params import semantic_params

    converted = mm.transpose_diag_convert(
        mm.encode_hoisted_diagonal(X42, semantic_params(4, scale=1)))
    assert list(converted.diagonals[1].slots) == [B0, C1, D0, A1]


def test_single_row_needs_no_rotation():
    be, key = make_semantic(4)
    enc = mm.encode_matrix_ciphertext(np.array([[1.0, 2.0, 3.0, 4.0]]),
                                      be.params, be, key)
    with MeasurementScope() as s:
        mm.transpose_diag_convert(enc, be)
    assert s.ops.rot == 0 and s.ops.hst_rot == 0


def test_ciphertext_conversion_books_plain_rotations(rng):
    """Each converted diagonal comes from a different ciphertext, so the
    min-1 rotations cannot share a hoisting and must appear as O3."""
    be, key = make_semantic(4)
    x = rng.integers(-8, 9, size=(4, 4)).astype(np.float64)
    enc = mm.encode_matrix_ciphertext(x, be.params, be, key)
    with MeasurementScope() as s:
        converted = mm.transpose_diag_convert(enc, be)
    assert s.ops.rot == 3 and s.ops.hst_rot == 0
    direct = mm.encode_hoisted_diagonal(x.T, be.params)
    for ct, want in zip(converted.diagonals, direct.diagonals):
        np.testing.assert_array_equal(be.decrypt(ct).slots, want.slots)


def test_converted_matrix_multiplies_as_transpose(rng):
    from hevfl.fixedpoint import to_fixed

    be, key = make_semantic(8)
    x, y = random_case(rng, max_dim=8)
    converted = mm.transpose_diag_convert(
        mm.encode_hoisted_diagonal(x, be.params))
    y2 = rng.integers(-8, 9, size=x.shape[0]).astype(np.float64)
    y_ct = mm.encrypt_vector(be, y2, "hoisted", key)
    out = mm.matmult("hoisted", converted, y_ct, be)
    t = be.params.plain_modulus
    decrypted = [be.decrypt(ct).slots for ct in out.ciphertexts] \
        if isinstance(out, mm.PendingResult) else [be.decrypt(out).slots]
    plan = out.reduction_plan if isinstance(out, mm.PendingResult) \
        else [[(0, k)] for k in range(x.shape[1])]
    got = np.asarray(mm.finalize_lazy_ras(decrypted, plan, modulus=t)[: x.shape[1]])
    want = oracles.matvec_mod(to_fixed(x.T, be.params.scale, t),
                              to_fixed(y2, be.params.scale, t), t)
    np.testing.assert_array_equal(got, want)


def test_conversion_rejects_other_layouts():
    from hevfl.params import semantic_params

    p8 = semantic_params(8, scale=1)
    with pytest.raises(LayoutUnsupported):
        mm.transpose_diag_convert(mm.encode_for_method("hoisted", X42, p8))  # packed
    with pytest.raises(LayoutUnsupported):
        mm.transpose_diag_convert(mm.encode_gala_diagonal(X42, semantic_params(4, scale=1)))
