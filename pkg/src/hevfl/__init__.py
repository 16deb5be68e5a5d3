"""Packed homomorphic-encryption toolkit for vertical federated learning.

Layers, bottom up:

- ``simd`` / ``rlwe``: the four SIMD ciphertext ops (add, plain-mult, rotate,
  hoisted multi-rotate) over two interchangeable backends — an exact
  cleartext simulation and a real lattice scheme.
- ``matmult``: matrix-vector products over encrypted vectors in five
  encodings, with exact operation-count prediction for each.
- ``netsim`` + ``protocols``: two-party training protocols (linear
  regression, secret-shared logistic regression, a split neural network)
  over an instrumented in-process network.
- ``cli``: benchmarking, complexity verification, dataset generation, and
  end-to-end training entry points.
"""

from .counters import CommStats, MeasurementScope, OpCounter, measure
from .params import PRESETS, CostModel, SchemeParams, cost_model_for, preset, semantic_params
from .simd import CiphertextHandle, Plaintext, SemanticBackend, SimdBackend

__all__ = [
    "CommStats",
    "MeasurementScope",
    "OpCounter",
    "measure",
    "PRESETS",
    "CostModel",
    "SchemeParams",
    "cost_model_for",
    "preset",
    "semantic_params",
    "CiphertextHandle",
    "Plaintext",
    "SemanticBackend",
    "SimdBackend",
]

__version__ = "0.1.0"
