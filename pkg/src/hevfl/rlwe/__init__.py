from .ntt import NttContext, find_ntt_prime, get_ntt_context, is_prime, rns_primes
from .bgv import (
    KeyMaterial,
    LweCiphertext,
    PolyRingElement,
    RlweCiphertext,
    RnsModulus,
    ntt_poly_mult,
)
from .backend import RlweBackend
from .cheetah import cheetah_matmult, coeff_encode_cheetah, coeff_encode_vec

__all__ = [
    "NttContext",
    "find_ntt_prime",
    "get_ntt_context",
    "is_prime",
    "rns_primes",
    "KeyMaterial",
    "LweCiphertext",
    "PolyRingElement",
    "RlweCiphertext",
    "RnsModulus",
    "ntt_poly_mult",
    "RlweBackend",
    "cheetah_matmult",
    "coeff_encode_cheetah",
    "coeff_encode_vec",
]
