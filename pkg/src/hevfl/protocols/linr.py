"""Two-party linear regression with an arbiter holding the keys.

One iteration: A sends its encrypted partial predictions to B; B folds in its
own partials and the labels to form the encrypted residual, replicated so it
can feed both parties' transposed-feature products; each party multiplies its
own X^T against the shared residual ciphertext, masks the result, and has the
arbiter decrypt. Unmasking plus the lazy rotate-and-sum finalization happen
locally, so the arbiter only ever sees uniformly masked slots.
"""

from __future__ import annotations

import numpy as np

from .. import matmult as mm
from ..counters import MeasurementScope, measure
from ..errors import ShapeMismatch
from ..fixedpoint import from_fixed
from ..netsim import Network
from ..simd import SimdBackend
from .common import IterationStats, PartyState, mask_ciphertext, retag

ARBITER = "C"


def _masked_gradient(
    backend: SimdBackend,
    party: PartyState,
    x_batch: np.ndarray,
    d_ct,
    net: Network,
    stats: IterationStats,
) -> np.ndarray:
    """X^T d via the packing pipeline, decrypted blind by the arbiter."""
    params = backend.params
    t = params.plain_modulus
    enc = mm.encode_for_method("hoisted", x_batch.T, params)

    with MeasurementScope() as scope:
        pending = mm.matmult("hoisted", enc, d_ct, backend)
    stats.ops[f"matmult_{party.role}"] = measure(scope)[0]

    masked, masks = [], []
    for ct in pending.ciphertexts:
        mct, r = mask_ciphertext(backend, ct, party.rng)
        masked.append(mct)
        masks.append(r)
    net.send(party.role, ARBITER, "rlwe_ct", masked, count=len(masked))

    received = net.recv(ARBITER, party.role).payload
    decrypted = [backend.decrypt(ct).slots for ct in received]
    net.send(
        ARBITER, party.role, "cleartext", decrypted,
        count=len(decrypted) * params.slot_count,
    )
    returned = net.recv(party.role, ARBITER).payload

    unmasked = [(dec - r) % t for dec, r in zip(returned, masks)]
    g_res = mm.finalize_lazy_ras(unmasked, pending.reduction_plan, modulus=t)
    return from_fixed(g_res, params.scale, t, scale_exponent=2) / len(x_batch)


def vfl_linr_iteration(
    backend: SimdBackend,
    state_a: PartyState,
    state_b: PartyState,
    arbiter: PartyState,
    batch: np.ndarray,
    net: Network,
    lr: float = 0.1,
) -> IterationStats:
    """One SGD step over `batch` (row indices into both feature tables)."""
    if state_a.features.shape[0] != state_b.features.shape[0]:
        raise ShapeMismatch(
            f"row-aligned feature tables required, got {state_a.features.shape[0]} "
            f"vs {state_b.features.shape[0]} rows"
        )
    params = backend.params
    stats = IterationStats()

    with MeasurementScope() as iteration_scope:
        xa = state_a.features[batch]
        xb = state_b.features[batch]
        y = state_b.labels[batch]

        # A -> B: encrypted partial predictions, replicated for reuse.
        u_a = xa @ state_a.weights
        ct_ua = mm.encrypt_vector(backend, u_a, "hoisted", arbiter.key_id)
        net.send("A", "B", "rlwe_ct", ct_ua, count=1)

        # B: residual d = u_A + (u_B - y), still replicated.
        ct_ua = net.recv("B", "A").payload
        resid_b = xb @ state_b.weights - y
        pt = mm.encode_vector(resid_b, "hoisted", params)
        d_ct = retag(backend.o1_add(pt, ct_ua), pt.replication)
        net.send("B", "A", "rlwe_ct", d_ct, count=1)
        d_ct_at_a = net.recv("A", "B").payload

        g_a = _masked_gradient(backend, state_a, xa, d_ct_at_a, net, stats)
        g_b = _masked_gradient(backend, state_b, xb, d_ct, net, stats)

        state_a.weights = state_a.weights - lr * g_a
        state_b.weights = state_b.weights - lr * g_b
    stats.comm = measure(iteration_scope)[1]
    stats.extras["grad_a"] = g_a
    stats.extras["grad_b"] = g_b

    # Out-of-band simulator metric (pre-update loss); not part of any transcript.
    stats.loss = float(np.mean((u_a + resid_b) ** 2) / 2.0)
    return stats
