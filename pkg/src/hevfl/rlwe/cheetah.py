"""Coefficient-packed matrix-vector product (single polynomial multiply).

Layout for X (m x n) against an encrypted column y (n,):

    Xpoly[i*n + (n-1) - j] = X[i, j]        ypoly[j] = y[j]

so coefficient i*n + n - 1 of Xpoly * ypoly equals sum_j X[i,j] * y[j]; the
cross terms land elsewhere and any negacyclic wraparound only touches
coefficients outside the m read positions. Needs m*n <= N. The m results are
returned as extracted single-coefficient ciphertexts, which is where this
method pays: m small ciphertexts out instead of one slot-packed one.
"""

from __future__ import annotations

import numpy as np

from ..errors import MatrixTooLarge, VectorTooLong
from ..fixedpoint import to_fixed
from ..params import SchemeParams


def result_coeff_index(i: int, n: int) -> int:
    """Coefficient position holding row i of the product."""
    return i * n + n - 1


def coeff_encode_cheetah(x: np.ndarray, params: SchemeParams) -> np.ndarray:
    """Fixed-point coefficient encoding of the matrix operand (length N)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    m, n = x.shape
    if m * n > params.ring_degree:
        raise MatrixTooLarge(
            f"{m}x{n} needs {m * n} coefficients > ring degree {params.ring_degree}"
        )
    fixed = to_fixed(x, params.scale, params.plain_modulus)
    poly = np.zeros(params.ring_degree, dtype=np.int64)
    for i in range(m):
        poly[i * n + (n - 1) - np.arange(n)] = fixed[i]
    return poly


def coeff_encode_vec(y: np.ndarray, params: SchemeParams) -> np.ndarray:
    """Fixed-point coefficient encoding of the vector operand (length N)."""
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(y) > params.ring_degree:
        raise VectorTooLong(f"{len(y)} entries > ring degree {params.ring_degree}")
    poly = np.zeros(params.ring_degree, dtype=np.int64)
    poly[: len(y)] = to_fixed(y, params.scale, params.plain_modulus)
    return poly


def cheetah_matmult(x: np.ndarray, ct_y, backend) -> list:
    """X times encrypted y with one ciphertext multiply; m extracted outputs."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    m, n = x.shape
    prod = backend.coeff_mult_plain(coeff_encode_cheetah(x, backend.params), ct_y)
    return [backend.extract_lwe(prod, result_coeff_index(i, n)) for i in range(m)]
