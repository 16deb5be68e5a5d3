"""Scheme parameter sets, the op-cost model, and config loading.

Three shipped presets:

======== ===== ===== ====== ============== ===== ==
name     N     N'    log_q  t              delta L
======== ===== ===== ====== ============== ===== ==
full-122 8192  4096  122    549756026881   2**13 1
full-156 8192  4096  156    549756026881   2**13 2
desk-1024 1024 512   122    274877908993   2**10 2
======== ===== ===== ====== ============== ===== ==

The `full-*` presets model the production parameter regime: the 122-bit
modulus budget admits one plaintext multiplication, the 156-bit budget two.
Byte accounting always uses the preset's modeled log_q; the live desk-scale
lattice backend runs its own (larger, RNS) modulus internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigInvalid
from .fixedpoint import MAX_PLAIN_MODULUS_BITS

# Primes chosen with t == 1 (mod 2N) so the slot batching congruence holds.
T_FULL = 549_756_026_881      # == 1 mod 2**14, ~2**39
T_DESK = 274_877_908_993      # == 1 mod 2**11, ~2**38


def _is_pow2(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class SchemeParams:
    """Static parameters of one batching-scheme configuration.

    ring_degree:        N, the polynomial ring degree (power of two)
    slot_count:         N', usable SIMD slots per ciphertext (N or N/2)
    coeff_modulus_bits: modeled log2(q) used for byte accounting
    plain_modulus:      t, the plaintext prime
    scale:              delta, fixed-point scaling factor
    max_mult_level:     L, multiplications a fresh ciphertext can absorb
    """

    ring_degree: int
    slot_count: int
    coeff_modulus_bits: int
    plain_modulus: int
    scale: int
    max_mult_level: int

    def __post_init__(self):
        if not _is_pow2(self.ring_degree):
            raise ConfigInvalid(f"ring degree {self.ring_degree} not a power of two")
        if self.slot_count not in (self.ring_degree, self.ring_degree // 2):
            raise ConfigInvalid(
                f"slot count {self.slot_count} must be N or N/2 for N={self.ring_degree}"
            )
        if self.coeff_modulus_bits <= 0:
            raise ConfigInvalid("coeff_modulus_bits must be positive")
        if self.plain_modulus.bit_length() > MAX_PLAIN_MODULUS_BITS:
            raise ConfigInvalid(
                f"plain modulus above 2**{MAX_PLAIN_MODULUS_BITS} breaks int64 arithmetic"
            )
        if self.scale < 1 or self.max_mult_level < 1:
            raise ConfigInvalid("scale and max_mult_level must be >= 1")

    def with_slots(self, slot_count: int) -> "SchemeParams":
        return replace(self, ring_degree=2 * slot_count, slot_count=slot_count)


@dataclass(frozen=True)
class CostModel:
    """Abstract unit costs for the four ciphertext ops plus ciphertext sizes.

    The unit costs are a modeling choice (rotation is by far the costliest
    basic op; hoisted rotation sits between rotation and multiplication) and
    are never used in correctness tests. Ciphertext byte sizes follow from
    the ring degree and the modeled modulus width.
    """

    cost_add: float = 1.0
    cost_mult: float = 2.0
    cost_rot: float = 30.0
    cost_hst_rot: float = 10.0
    ring_degree: int = 8192
    coeff_modulus_bits: int = 122

    def __post_init__(self):
        ok = self.cost_rot > self.cost_hst_rot > self.cost_mult >= self.cost_add > 0
        if not ok:
            raise ConfigInvalid(
                "cost model must satisfy rot > hst_rot > mult >= add > 0, got "
                f"({self.cost_add}, {self.cost_mult}, {self.cost_rot}, {self.cost_hst_rot})"
            )

    @property
    def rlwe_ct_bytes(self) -> int:
        return 2 * self.ring_degree * ((self.coeff_modulus_bits + 7) // 8)

    @property
    def lwe_ct_bytes(self) -> int:
        return (self.ring_degree + 1) * ((self.coeff_modulus_bits + 7) // 8)

    def op_cost(self, add: int, mult: int, rot: int, hst_rot: int) -> float:
        return (
            add * self.cost_add
            + mult * self.cost_mult
            + rot * self.cost_rot
            + hst_rot * self.cost_hst_rot
        )


PRESETS: dict[str, SchemeParams] = {
    "full-122": SchemeParams(8192, 4096, 122, T_FULL, 2**13, 1),
    "full-156": SchemeParams(8192, 4096, 156, T_FULL, 2**13, 2),
    "desk-1024": SchemeParams(1024, 512, 122, T_DESK, 2**10, 2),
}


def preset(name: str) -> SchemeParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigInvalid(f"unknown preset {name!r}; have {sorted(PRESETS)}") from None


def cost_model_for(params: SchemeParams, **unit_costs) -> CostModel:
    return CostModel(
        ring_degree=params.ring_degree,
        coeff_modulus_bits=params.coeff_modulus_bits,
        **unit_costs,
    )


def semantic_params(
    slot_count: int,
    *,
    plain_modulus: int = T_FULL,
    scale: int = 2**13,
    max_mult_level: int = 2,
    coeff_modulus_bits: int = 122,
) -> SchemeParams:
    """Ad-hoc parameters for cleartext-simulation runs at a chosen slot count."""
    return SchemeParams(
        ring_degree=2 * slot_count,
        slot_count=slot_count,
        coeff_modulus_bits=coeff_modulus_bits,
        plain_modulus=plain_modulus,
        scale=scale,
        max_mult_level=max_mult_level,
    )


_CONFIG_KEYS = {"cost_add", "cost_mult", "cost_rot", "cost_hst_rot", "N", "log_q", "t", "delta"}


def load_config(path: str | Path) -> tuple[SchemeParams, CostModel]:
    """Load scheme + cost configuration from a JSON file.

    Expected keys: cost_add, cost_mult, cost_rot, cost_hst_rot, N, log_q, t,
    delta. Optional: slots (default N/2), max_level (default 1).
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigInvalid("config root must be a JSON object")
    missing = _CONFIG_KEYS - raw.keys()
    if missing:
        raise ConfigInvalid(f"config missing keys: {sorted(missing)}")
    try:
        params = SchemeParams(
            ring_degree=int(raw["N"]),
            slot_count=int(raw.get("slots", int(raw["N"]) // 2)),
            coeff_modulus_bits=int(raw["log_q"]),
            plain_modulus=int(raw["t"]),
            scale=int(raw["delta"]),
            max_mult_level=int(raw.get("max_level", 1)),
        )
        cost = CostModel(
            cost_add=float(raw["cost_add"]),
            cost_mult=float(raw["cost_mult"]),
            cost_rot=float(raw["cost_rot"]),
            cost_hst_rot=float(raw["cost_hst_rot"]),
            ring_degree=params.ring_degree,
            coeff_modulus_bits=params.coeff_modulus_bits,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad config value: {exc}") from None
    return params, cost
