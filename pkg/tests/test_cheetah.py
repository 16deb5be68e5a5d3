"""Coefficient-packed single-product matvec, on both backends."""

import numpy as np
import pytest

from hevfl.errors import MatrixTooLarge
from hevfl.params import SchemeParams, semantic_params
from hevfl.rlwe.backend import RlweBackend
from hevfl.rlwe.cheetah import (
    cheetah_matmult,
    coeff_encode_cheetah,
    coeff_encode_vec,
    result_coeff_index,
)
from hevfl.simd import SemanticBackend

import oracles
from support import make_semantic, matmult_values


def test_matrix_coefficient_layout_4x2():
    """Row entries go in reversed per-row runs: the 4x2 matrix becomes
    A1 + A0 X + B1 X^2 + B0 X^3 + C1 X^4 + C0 X^5 + D1 X^6 + D0 X^7."""
    params = semantic_params(8, scale=1)  # ring degree 16
    x = np.array([[10, 11], [20, 21], [30, 31], [40, 41]], dtype=np.float64)
    poly = coeff_encode_cheetah(x, params)
    np.testing.assert_array_equal(poly[:8], [11, 10, 21, 20, 31, 30, 41, 40])
    assert all(poly[8:] == 0)


def test_vector_coefficient_layout():
    params = semantic_params(8, scale=1)
    poly = coeff_encode_vec(np.array([5.0, 6.0]), params)
    np.testing.assert_array_equal(poly[:2], [5, 6])
    assert all(poly[2:] == 0)


def test_result_indices_4x2():
    # with n = 2, row i's dot product sits at coefficient 2i + 1
    assert [result_coeff_index(i, 2) for i in range(4)] == [1, 3, 5, 7]


def test_product_semantic_exact(rng):
    be, key = make_semantic(8)
    x = rng.integers(-8, 9, size=(4, 2)).astype(np.float64)
    y = rng.integers(-8, 9, size=2).astype(np.float64)
    np.testing.assert_allclose(matmult_values(be, "cheetah", x, y, key), x @ y)


def test_product_via_direct_helper(rng):
    be, key = make_semantic(16)
    p = be.params
    x = rng.integers(-8, 9, size=(5, 3)).astype(np.float64)
    y = rng.integers(-8, 9, size=3).astype(np.float64)
    ct_y = be.encrypt_coeff(coeff_encode_vec(y, p), key)
    lwes = cheetah_matmult(x, ct_y, be)
    got = np.array([be.decrypt_lwe(c) for c in lwes]) / p.scale**2
    np.testing.assert_allclose(got, x @ y)


def test_product_on_lattice_backend(desk_backend, rng):
    be = desk_backend
    key = be.keygen()
    x = rng.integers(-8, 9, size=(8, 5)).astype(np.float64)
    y = rng.integers(-8, 9, size=5).astype(np.float64)
    np.testing.assert_allclose(matmult_values(be, "cheetah", x, y, key), x @ y)


def test_operand_budget_is_the_ring_degree():
    params = semantic_params(8, scale=1)  # N = 16
    ok = np.ones((4, 4))
    coeff_encode_cheetah(ok, params)  # 16 coefficients: exactly fits
    with pytest.raises(MatrixTooLarge):
        coeff_encode_cheetah(np.ones((4, 5)), params)


def test_unpadded_dimensions_are_used(rng):
    """3x3 fits a ring of degree 16 even though padding to 4x4 would also;
    the coefficient layout must not pad at all (9 coefficients used)."""
    be, key = make_semantic(8)
    x = rng.integers(-8, 9, size=(3, 3)).astype(np.float64)
    y = rng.integers(-8, 9, size=3).astype(np.float64)
    enc = coeff_encode_cheetah(x, be.params)
    assert np.count_nonzero(enc[9:]) == 0
    np.testing.assert_allclose(matmult_values(be, "cheetah", x, y, key), x @ y)


def test_wraparound_stays_clear_of_result_slots(rng):
    """With m*n == N the top row's cross terms wrap negacyclically; the m
    read positions must still hold exact dot products."""
    be, key = make_semantic(8)  # N = 16
    x = rng.integers(-8, 9, size=(4, 4)).astype(np.float64)
    y = rng.integers(-8, 9, size=4).astype(np.float64)
    np.testing.assert_allclose(matmult_values(be, "cheetah", x, y, key), x @ y)
