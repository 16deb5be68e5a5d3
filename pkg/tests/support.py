"""Shared harness helpers for exercising the matmult pipeline in tests.

These wrap the package's own entry points (encode, encrypt, multiply,
decrypt) into one call that returns raw mod-t residues, so individual tests
can compare against :mod:`oracles` without repeating the per-method result
plumbing (single ciphertext vs. pending lazy reduction vs. extracted
coefficient batch).
"""

from __future__ import annotations

import numpy as np

from hevfl import matmult as mm
from hevfl.params import SchemeParams, semantic_params
from hevfl.simd import SemanticBackend, SimdBackend


def make_semantic(slots: int, **overrides) -> tuple[SemanticBackend, int]:
    """Semantic backend at `slots` with a fresh unrestricted key."""
    backend = SemanticBackend(semantic_params(slots, **overrides))
    return backend, backend.keygen()


def run_matmult_residues(
    backend: SimdBackend,
    method: str,
    x: np.ndarray,
    y: np.ndarray,
    key_id: int,
    *,
    eager: bool = False,
) -> np.ndarray:
    """Full X . [[y]] round trip; returns the m result residues mod t."""
    t = backend.params.plain_modulus
    m = x.shape[0]
    enc = mm.encode_for_method(method, x, backend.params)
    y_ct = mm.encrypt_vector(backend, y, method, key_id)
    out = mm.matmult(method, enc, y_ct, backend, eager=eager)
    if isinstance(out, mm.PendingResult):
        decrypted = [backend.decrypt(ct).slots for ct in out.ciphertexts]
        return np.asarray(
            mm.finalize_lazy_ras(decrypted, out.reduction_plan, modulus=t)[:m]
        )
    if isinstance(out, list):
        return np.array([backend.decrypt_lwe(ct) % t for ct in out], dtype=np.int64)
    return backend.decrypt(out).slots[:m] % t


def matmult_values(
    backend: SimdBackend,
    method: str,
    x: np.ndarray,
    y: np.ndarray,
    key_id: int,
    *,
    eager: bool = False,
) -> np.ndarray:
    """Like :func:`run_matmult_residues` but decoded back to reals."""
    from hevfl.fixedpoint import from_fixed

    residues = run_matmult_residues(backend, method, x, y, key_id, eager=eager)
    p = backend.params
    return from_fixed(residues, p.scale, p.plain_modulus, scale_exponent=2)


def random_case(rng: np.random.Generator, max_dim: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Small random integer-valued matrix/vector pair (exact at any scale)."""
    m = int(rng.integers(1, max_dim + 1))
    n = int(rng.integers(1, max_dim + 1))
    x = rng.integers(-8, 9, size=(m, n)).astype(np.float64)
    y = rng.integers(-8, 9, size=n).astype(np.float64)
    return x, y


def params_for_tests(slots: int, **overrides) -> SchemeParams:
    return semantic_params(slots, **overrides)
