"""Shared pieces of the two-party training protocols.

Additive secret sharing mod t, the cubic sigmoid surrogate, the party /
iteration bookkeeping types, and an ideal dealer standing in for the offline
phase of share-domain multiplication. Everything here operates on fixed-point
integer residues; floats only appear at the protocol edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ..counters import CommStats, OpCounter
from ..errors import ConfigInvalid, ShapeMismatch
from ..fixedpoint import center, mulmod, uniform_mod
from ..params import SchemeParams
from ..simd import CiphertextHandle, SimdBackend


@dataclass
class Shares:
    """Additive two-way sharing: share1 + share2 = value (mod modulus)."""

    share1: np.ndarray
    share2: np.ndarray
    modulus: int

    def __post_init__(self):
        self.share1 = np.asarray(self.share1, dtype=np.int64) % self.modulus
        self.share2 = np.asarray(self.share2, dtype=np.int64) % self.modulus
        if self.share1.shape != self.share2.shape:
            raise ShapeMismatch(
                f"share shapes differ: {self.share1.shape} vs {self.share2.shape}"
            )


def secret_share(v: np.ndarray, modulus: int, rng: np.random.Generator) -> Shares:
    """Split residues into (uniform, v - uniform) mod modulus."""
    v = np.asarray(v, dtype=np.int64) % modulus
    share1 = uniform_mod(rng, modulus, v.shape)
    return Shares(share1, (v - share1) % modulus, modulus)


def reconstruct(shares: Shares) -> np.ndarray:
    return (shares.share1 + shares.share2) % shares.modulus


@dataclass(frozen=True)
class SigmoidPoly:
    """Cubic sigmoid surrogate q0 + q1*z + q2*z**3."""

    q0: float = 0.5
    q1: float = 0.197
    q2: float = -0.004

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        return self.q0 + self.q1 * z + self.q2 * z**3


@dataclass(frozen=True)
class TrainingConfig:
    batch_size: int
    n_features_a: int
    n_features_b: int
    learning_rate: float
    epochs: int
    params: SchemeParams
    hidden_units: int = 0
    sigmoid: SigmoidPoly = SigmoidPoly()

    def __post_init__(self):
        positive = (
            self.batch_size > 0
            and self.n_features_a > 0
            and self.n_features_b > 0
            and self.learning_rate > 0
            and self.epochs >= 0
            and self.hidden_units >= 0
        )
        if not positive:
            raise ConfigInvalid("training dimensions and learning rate must be positive")


@dataclass
class PartyState:
    """One party's private state. A party never holds the other's raw
    features or cleartext labels; masks must be drawn fresh from `rng`
    each iteration."""

    role: str
    rng: np.random.Generator
    features: np.ndarray | None = None
    labels: np.ndarray | None = None
    weights: np.ndarray | None = None
    weight_share: np.ndarray | None = None       # share of own weights, mod t
    peer_weight_share: np.ndarray | None = None  # share of the peer's weights
    enc_weight_share: Any = None                 # peer's share of own weights, encrypted
    interactive_weights: np.ndarray | None = None
    top_weights: np.ndarray | None = None
    key_id: int | None = None
    enc_alpha: Any = None                        # uploaded ciphertext diagonals
    enc_alpha_t: Any = None                      # transpose-converted diagonals
    mask_ledger: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class IterationStats:
    ops: dict[str, OpCounter] = field(default_factory=dict)
    comm: CommStats | None = None
    loss: float | None = None
    levels_consumed: dict[str, int] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)


class IdealDealer:
    """Trusted offline functionality for share-domain nonlinear steps.

    Stands in for the Beaver-triple products and probabilistic truncation of
    the source secret-sharing protocol: it reconstructs internally, applies
    the exact operation (including exact rescaling back to one fixed-point
    scale factor), and re-shares with fresh randomness. Exactness keeps the
    level-accounting and parity tests deterministic.
    """

    def __init__(self, rng: np.random.Generator, modulus: int, scale: int):
        self.rng = rng
        self.modulus = modulus
        self.scale = scale

    def _reshare(self, residues: np.ndarray) -> Shares:
        return secret_share(residues, self.modulus, self.rng)

    def cube(self, z: Shares) -> Shares:
        """Shares of z**3 at scale 1, from shares of z at scale 1."""
        val = center(reconstruct(z), self.modulus).astype(np.float64)
        cubed = np.rint(val**3 / float(self.scale) ** 2).astype(np.int64)
        return self._reshare(cubed)

    def affine_rescale(self, v: Shares, mul: float = 1.0, div: float = 1.0) -> Shares:
        """Shares of round(value * mul / div): the exact-truncation step."""
        val = center(reconstruct(v), self.modulus).astype(np.float64)
        return self._reshare(np.rint(val * mul / div).astype(np.int64))

    def matvec(self, x: np.ndarray, v: Shares) -> Shares:
        """Shares of X @ v rescaled to scale 1; X is a cleartext real matrix."""
        val = center(reconstruct(v), self.modulus).astype(np.float64)
        out = np.rint(np.asarray(x, dtype=np.float64) @ val).astype(np.int64)
        return self._reshare(out)


def retag(ct: CiphertextHandle, tag: tuple) -> CiphertextHandle:
    """Restore a replication tag that an o1_add conservatively dropped.

    Only valid when the caller knows both addends carried layout `tag`
    (adding identically replicated vectors preserves the layout).
    """
    return replace(ct, replication=tag)


def mask_ciphertext(
    backend: SimdBackend, ct: CiphertextHandle, rng: np.random.Generator
) -> tuple[CiphertextHandle, np.ndarray]:
    """Add a fresh uniform slot mask; returns (masked ct, mask residues)."""
    t = backend.params.plain_modulus
    r = uniform_mod(rng, t, backend.params.slot_count)
    masked = backend.o1_add(backend.encode_raw(r, ct.scale_exponent), ct)
    return masked, r


def share_matvec_cleartext(x_fixed: np.ndarray, share: np.ndarray, modulus: int) -> np.ndarray:
    """(X_fixed @ share) mod t with exact modular arithmetic."""
    x_fixed = np.asarray(x_fixed, dtype=np.int64) % modulus
    out = np.zeros(x_fixed.shape[0], dtype=np.int64)
    for j in range(x_fixed.shape[1]):
        out = (out + mulmod(x_fixed[:, j], share[j], modulus)) % modulus
    return out
