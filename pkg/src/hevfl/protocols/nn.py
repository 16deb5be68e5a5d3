"""Split neural-network layer training over an encrypted embedding.

A uploads its embedding once per batch as encrypted diagonals; B drives both
the forward product against the interactive weights and — after converting
the diagonals to the transpose layout while otherwise idle — the backward
product against the activation gradient. All rotations land on B's cleartext
operands, so the ciphertext work is multiply/add only, and A's embedding
never travels a second time. Results come back to A under fresh uniform
masks; B keeps the rotate-and-sum image of each mask as its correction.
"""

from __future__ import annotations

import numpy as np

from .. import matmult as mm
from ..counters import MeasurementScope, measure
from ..errors import MissingConvertedTranspose, ShapeMismatch
from ..fixedpoint import from_fixed, uniform_mod
from ..netsim import Network
from ..simd import SimdBackend
from .common import IterationStats, PartyState


def _bottom_embedding(state: PartyState, batch: np.ndarray) -> np.ndarray:
    x = state.features[batch]
    if state.weights is None:
        return x
    return x @ state.weights


def _masked_columns(backend, pendings, rng):
    """Mask each pending column; returns (payload, mask image per column)."""
    t = backend.params.plain_modulus
    sent, eps_cols = [], []
    for pending in pendings:
        masked_cts, mask_vecs = [], []
        for ct in pending.ciphertexts:
            r = uniform_mod(rng, t, backend.params.slot_count)
            masked_cts.append(backend.o1_add(backend.encode_raw(r, ct.scale_exponent), ct))
            mask_vecs.append(r)
        sent.append((masked_cts, pending.reduction_plan))
        eps_cols.append(mm.finalize_lazy_ras(mask_vecs, pending.reduction_plan, modulus=t))
    return sent, np.stack(eps_cols, axis=1)


def _finalize_columns(backend, payload) -> np.ndarray:
    t = backend.params.plain_modulus
    cols = []
    for cts, plan in payload:
        decrypted = [backend.decrypt(ct).slots for ct in cts]
        cols.append(mm.finalize_lazy_ras(decrypted, plan, modulus=t))
    return np.stack(cols, axis=1)


def vfl_nn_forward(
    backend: SimdBackend,
    state_a: PartyState,
    state_b: PartyState,
    batch: np.ndarray,
    net: Network,
) -> tuple[np.ndarray, IterationStats]:
    """B computes [[alpha_A]] @ W_A column by column; A ends up with the
    masked product (residues mod t at the product scale), B with the mask
    image it must later subtract."""
    params = backend.params
    stats = IterationStats()

    with MeasurementScope() as iteration_scope:
        # A: upload the embedding diagonals (the only ciphertext upload).
        alpha = _bottom_embedding(state_a, batch)
        state_a.enc_alpha = mm.encode_matrix_ciphertext(
            alpha, params, backend, state_a.key_id
        )
        net.send("A", "B", "rlwe_ct", state_a.enc_alpha,
                 count=len(state_a.enc_alpha.diagonals))

        enc_alpha = net.recv("B", "A").payload
        w = state_b.interactive_weights
        if w.shape[0] != enc_alpha.orig_n:
            raise ShapeMismatch(
                f"interactive weights have {w.shape[0]} rows, embedding has "
                f"{enc_alpha.orig_n} columns"
            )

        # B, idle while A would normally wait: transpose-convert for backward.
        state_b.enc_alpha_t = mm.transpose_diag_convert(enc_alpha, backend=backend)

        with MeasurementScope() as scope:
            pendings = mm.matmult_encrypted_diagonals(enc_alpha, w, backend)
        stats.ops["nn_forward_matmult"] = measure(scope)[0]

        sent, eps = _masked_columns(backend, pendings, state_b.rng)
        state_b.mask_ledger["eps_forward"] = eps
        net.send("B", "A", "rlwe_ct", sent, count=sum(len(c) for c, _ in sent))

        z_masked = _finalize_columns(backend, net.recv("A", "B").payload)

    stats.comm = measure(iteration_scope)[1]
    return z_masked, stats


def vfl_nn_backward(
    backend: SimdBackend,
    state_a: PartyState,
    state_b: PartyState,
    delta_act: np.ndarray,
    net: Network,
) -> tuple[np.ndarray, IterationStats]:
    """B computes [[alpha_A^T]] @ delta_act from the converted diagonals; A
    receives the masked weight gradient. No embedding retransmission."""
    if state_b.enc_alpha_t is None:
        raise MissingConvertedTranspose(
            "run the forward pass first; the transpose conversion happens there"
        )
    stats = IterationStats()

    with MeasurementScope() as iteration_scope:
        with MeasurementScope() as scope:
            pendings = mm.matmult_encrypted_diagonals(
                state_b.enc_alpha_t, delta_act, backend
            )
        stats.ops["nn_backward_matmult"] = measure(scope)[0]

        sent, eps = _masked_columns(backend, pendings, state_b.rng)
        state_b.mask_ledger["eps_backward"] = eps
        net.send("B", "A", "rlwe_ct", sent, count=sum(len(c) for c, _ in sent))

        g_masked = _finalize_columns(backend, net.recv("A", "B").payload)

    stats.comm = measure(iteration_scope)[1]
    return g_masked, stats


def nn_init_states(
    backend: SimdBackend,
    *,
    features_a: np.ndarray,
    features_b: np.ndarray,
    labels: np.ndarray,
    hidden_units: int,
    key_a: int,
    seed: int = 0,
) -> tuple[PartyState, PartyState]:
    """B owns every trainable weight; A contributes features and a key.

    The interactive layer splits by feature owner: `interactive_weights`
    multiplies A's (encrypted) embedding, `weights` on B's side multiplies
    B's own columns, and `top_weights` maps the hidden layer to the logit.
    """
    rng = np.random.default_rng(seed)
    n_a = np.asarray(features_a).shape[1]
    n_b = np.asarray(features_b).shape[1]
    state_a = PartyState(
        role="A",
        rng=np.random.default_rng(seed + 11),
        features=np.asarray(features_a, dtype=np.float64),
        key_id=key_a,
    )
    state_b = PartyState(
        role="B",
        rng=np.random.default_rng(seed + 22),
        features=np.asarray(features_b, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.float64),
        weights=rng.uniform(-0.5, 0.5, (n_b, hidden_units)),
        interactive_weights=rng.uniform(-0.5, 0.5, (n_a, hidden_units)),
        top_weights=rng.uniform(-0.5, 0.5, hidden_units),
    )
    return state_a, state_b


def vfl_nn_train_iteration(
    backend: SimdBackend,
    state_a: PartyState,
    state_b: PartyState,
    batch: np.ndarray,
    net: Network,
    lr: float,
) -> IterationStats:
    """One SGD step of the split model, both heavy products under encryption.

    The masked forward/backward outputs return to B in cleartext (they are
    uniformly masked, so A's wire reveals nothing); B subtracts its mask
    images, finishes the top layer and all weight updates locally.
    """
    params = backend.params
    t = params.plain_modulus
    x_b = state_b.features[batch]
    y = state_b.labels[batch]
    m = len(batch)
    stats = IterationStats()

    with MeasurementScope() as iteration_scope:
        z_masked, st_f = vfl_nn_forward(backend, state_a, state_b, batch, net)
        stats.ops.update(st_f.ops)
        net.send("A", "B", "cleartext", z_masked, count=z_masked.size)
        zm = net.recv("B", "A").payload
        z_res = (zm - state_b.mask_ledger["eps_forward"]) % t
        z_a = from_fixed(z_res, params.scale, t, scale_exponent=2)

        u = z_a + x_b @ state_b.weights
        logits = u @ state_b.top_weights
        p = 1.0 / (1.0 + np.exp(-logits))
        stats.loss = float(-np.mean(
            y * np.log(np.clip(p, 1e-9, 1.0)) +
            (1.0 - y) * np.log(np.clip(1.0 - p, 1e-9, 1.0))
        ))
        d_logit = (p - y) / m
        g_top = u.T @ d_logit
        d_u = np.outer(d_logit, state_b.top_weights)

        g_masked, st_b = vfl_nn_backward(backend, state_a, state_b, d_u, net)
        stats.ops.update(st_b.ops)
        net.send("A", "B", "cleartext", g_masked, count=g_masked.size)
        gm = net.recv("B", "A").payload
        g_res = (gm - state_b.mask_ledger["eps_backward"]) % t
        g_wa = from_fixed(g_res, params.scale, t, scale_exponent=2)
        g_wb = x_b.T @ d_u

        state_b.interactive_weights = state_b.interactive_weights - lr * g_wa
        state_b.weights = state_b.weights - lr * g_wb
        state_b.top_weights = state_b.top_weights - lr * g_top

    stats.comm = measure(iteration_scope)[1]
    stats.extras["g_wa"] = g_wa
    stats.extras["g_top"] = g_top
    return stats
