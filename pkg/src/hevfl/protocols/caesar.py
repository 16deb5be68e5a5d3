"""Secret-sharing/HE hybrid training steps: masked forward products and the
single-level logistic gradient.

The forward half computes X_A . [[<w_A>_2]] with the matrix partitioned to
fit the slot budget, aggregates partial products before anything leaves the
party, subtracts a fresh mask, and lets the key owner decrypt; both sides end
up holding additive shares of the product. The gradient half evaluates the
cubic-sigmoid residual against X_B^T while consuming exactly one
multiplication level: the polynomial's linear coefficients are folded into
the plaintext diagonals, and the constant term travels as cleartext expanded
so it rejoins the ciphertext terms after the same number of fold rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import matmult as mm
from ..counters import MeasurementScope, measure
from ..errors import LevelExhausted, ShapeMismatch
from ..fixedpoint import center, to_fixed, uniform_mod
from ..netsim import Network
from ..simd import CiphertextHandle, SimdBackend
from .common import (
    IdealDealer,
    IterationStats,
    PartyState,
    Shares,
    SigmoidPoly,
    TrainingConfig,
    reconstruct,
    retag,
    secret_share,
    share_matvec_cleartext,
)


def caesar_setup_weights(
    backend: SimdBackend,
    w: np.ndarray,
    key: int,
    rng: np.random.Generator,
    encrypt_share: int = 2,
) -> tuple[np.ndarray, CiphertextHandle | list[CiphertextHandle]]:
    """Share a weight vector; return (cleartext share, other share encrypted).

    The encrypted share is laid out (replicated, segmented if the feature
    count exceeds the slot budget) so the feature owner can feed it straight
    into the partitioned product later. `encrypt_share` selects which half
    gets encrypted under `key`; the other half is returned in the clear.
    """
    params = backend.params
    shares = secret_share(
        to_fixed(w, params.scale, params.plain_modulus), params.plain_modulus, rng
    )
    hidden = shares.share2 if encrypt_share == 2 else shares.share1
    clear = shares.share1 if encrypt_share == 2 else shares.share2
    enc = mm.encrypt_vector(backend, hidden, "hoisted", key, raw=True)
    return clear, enc


def caesar_forward(
    backend: SimdBackend,
    computing: PartyState,
    key_owner: PartyState,
    net: Network,
    x: np.ndarray | None = None,
) -> tuple[Shares, IterationStats]:
    """Shares of X . [[<w>]] (mod t, product scale): the computing party holds
    share1 from its own mask, the key owner share2 from blind decryption."""
    params = backend.params
    t = params.plain_modulus
    x = computing.features if x is None else x
    src, dst = computing.role, key_owner.role
    stats = IterationStats()

    with MeasurementScope() as iteration_scope:
        enc = mm.encode_for_method("hoisted", x, params)
        with MeasurementScope() as scope:
            pending = mm.matmult("hoisted", enc, computing.enc_weight_share, backend)
        stats.ops[f"matmult_{src}"] = measure(scope)[0]

        masked, masks = [], []
        for ct in pending.ciphertexts:
            r = uniform_mod(computing.rng, t, params.slot_count)
            mct = backend.o1_add(backend.encode_raw((-r) % t, ct.scale_exponent), ct)
            masked.append(mct)
            masks.append(r)
        net.send(src, dst, "rlwe_ct", (masked, pending.reduction_plan), count=len(masked))

        cts, plan = net.recv(dst, src).payload
        decrypted = [backend.decrypt(ct).slots for ct in cts]
        share_b = mm.finalize_lazy_ras(decrypted, plan, modulus=t)
        share_a = mm.finalize_lazy_ras(masks, pending.reduction_plan, modulus=t)

    stats.comm = measure(iteration_scope)[1]
    stats.extras[f"ct_messages_{src}_to_{dst}"] = len(masked)
    return Shares(share_a, share_b, t), stats


@dataclass
class GradientIngredients:
    """Everything B produces for [[g_B]]; finalized after decryption."""

    pending: mm.PendingResult | None
    clear_expanded: np.ndarray | None
    ras_rounds: int
    levels_consumed: int
    scale_exponent: int
    n_out: int


def _fold_rounds(plan: list[list[tuple[int, int]]]) -> int:
    width = len(plan[0])
    return int(math.log2(width)) if width > 1 else 0


def forward_ras_cleartext(v: np.ndarray, rounds: int, modulus: int) -> np.ndarray:
    """Halve-and-add `rounds` times; inverse of the cleartext expansion."""
    v = np.asarray(v, dtype=np.int64) % modulus
    for _ in range(rounds):
        half = len(v) // 2
        v = (v[:half] + v[half:]) % modulus
    return v


def caesar_gradient_mlr(
    backend: SimdBackend,
    z_ct: CiphertextHandle,
    z3_ct: CiphertextHandle,
    x_b: np.ndarray,
    y: np.ndarray | None,
    *,
    sigmoid: SigmoidPoly = SigmoidPoly(),
    rng: np.random.Generator | None = None,
    reduced: bool = True,
    const_ct: CiphertextHandle | None = None,
) -> GradientIngredients:
    """Ingredients of g = X^T (q0 + q1 z + q2 z^3 - y).

    reduced=True folds q1/q2 into the plaintext diagonals so each of the two
    ciphertext terms spends one level and they merge at the same depth;
    reduced=False scales the residual in ciphertext first and then multiplies
    by X^T, spending two levels.

    The constant-minus-labels term enters one of two ways: with labels `y`
    in hand it is computed in cleartext and expanded so it folds alongside
    the ciphertext terms (`rng` required); a party without the labels passes
    the term pre-encrypted as `const_ct` instead, and it joins as a third
    one-level product.
    """
    params = backend.params
    t = params.plain_modulus
    x_b = np.asarray(x_b, dtype=np.float64)
    if y is not None and x_b.shape[0] != len(y):
        raise ShapeMismatch(f"{x_b.shape[0]} rows vs {len(y)} labels")
    if (y is None) == (const_ct is None):
        raise ShapeMismatch("exactly one of y / const_ct supplies the constant term")
    xt = x_b.T
    n_out, m = xt.shape
    level_before = z_ct.level

    if reduced:
        pending = None
        if sigmoid.q1 != 0 or sigmoid.q2 != 0:
            enc_q1 = mm.encode_for_method("hoisted", sigmoid.q1 * xt, params)
            enc_q2 = mm.encode_for_method("hoisted", sigmoid.q2 * xt, params)
            p1 = mm.matmult("hoisted", enc_q1, z_ct, backend)
            p2 = mm.matmult("hoisted", enc_q2, z3_ct, backend)
            combined = [backend.o1_add(a, b)
                        for a, b in zip(p1.ciphertexts, p2.ciphertexts)]
            pending = mm.PendingResult(combined, p1.reduction_plan)
        if const_ct is not None:
            enc_x = mm.encode_for_method("hoisted", xt, params)
            p3 = mm.matmult("hoisted", enc_x, const_ct, backend)
            if pending is None:
                pending = p3
            else:
                pending = mm.PendingResult(
                    [backend.o1_add(a, b)
                     for a, b in zip(pending.ciphertexts, p3.ciphertexts)],
                    pending.reduction_plan,
                )
        levels = level_before - pending.ciphertexts[0].level if pending else 0
        rounds = _fold_rounds(pending.reduction_plan) if pending else 0
        expanded = None
        if y is not None:
            clear = to_fixed(xt @ (sigmoid.q0 - np.asarray(y)), params.scale**2, t)
            expanded = mm.inverse_ras_cleartext(
                clear, rounds, rng, slot_count=params.slot_count, modulus=t
            )
        return GradientIngredients(pending, expanded, rounds, levels, 2, n_out)

    # Unreduced: residual assembled in ciphertext, then the matrix product.
    reps = params.slot_count // mm._pad_pow2(m)
    tile = lambda vals: np.tile(np.pad(vals, (0, mm._pad_pow2(m) - m)), reps)
    q1_pt = backend.encode_raw(tile(to_fixed(np.full(m, sigmoid.q1), params.scale, t)), 1)
    q2_pt = backend.encode_raw(tile(to_fixed(np.full(m, sigmoid.q2), params.scale, t)), 1)
    e_ct = backend.o1_add(backend.o2_mult(q1_pt, z_ct), backend.o2_mult(q2_pt, z3_ct))
    const = backend.encode_raw(
        tile(to_fixed(sigmoid.q0 - np.asarray(y), params.scale**2, t)), 2
    )
    e_ct = retag(backend.o1_add(const, e_ct), ("replicated", mm._pad_pow2(m)))

    enc = mm.encode_for_method("hoisted", xt, params)
    if e_ct.level < 1:
        raise LevelExhausted(
            "unreduced gradient needs two levels; ciphertext has none left"
        )
    pending = mm.matmult("hoisted", enc, e_ct, backend)
    levels = level_before - pending.ciphertexts[0].level
    return GradientIngredients(
        pending, None, _fold_rounds(pending.reduction_plan), levels, 3, n_out
    )


def caesar_gradient_finalize(
    backend: SimdBackend, ingredients: GradientIngredients
) -> np.ndarray:
    """Decrypt + fold both terms into length-n gradient residues mod t."""
    t = backend.params.plain_modulus
    total = np.zeros(ingredients.n_out, dtype=np.int64)
    if ingredients.pending is not None:
        decrypted = [backend.decrypt(ct).slots for ct in ingredients.pending.ciphertexts]
        total = mm.finalize_lazy_ras(
            decrypted, ingredients.pending.reduction_plan, modulus=t
        )
    if ingredients.clear_expanded is not None:
        folded = forward_ras_cleartext(
            ingredients.clear_expanded, ingredients.ras_rounds, t
        )
        total = (total + folded[: ingredients.n_out]) % t
    return total


def assemble_shared_ct(
    backend: SimdBackend,
    enc_share: CiphertextHandle | list[CiphertextHandle],
    own_share: np.ndarray,
    m: int,
) -> CiphertextHandle:
    """[[v]] from an encrypted half and a cleartext half (replicated layout)."""
    if isinstance(enc_share, list):
        if len(enc_share) != 1:
            raise ShapeMismatch("segmented shares cannot be assembled in one ct")
        enc_share = enc_share[0]
    params = backend.params
    pad = mm._pad_pow2(m)
    tiled = np.tile(
        np.pad(np.asarray(own_share, dtype=np.int64) % params.plain_modulus,
               (0, pad - m)),
        params.slot_count // pad,
    )
    pt = backend.encode_raw(tiled, enc_share.scale_exponent)
    return retag(backend.o1_add(pt, enc_share), ("replicated", pad))


def exchange_masked_gradient(
    backend: SimdBackend,
    ingredients: GradientIngredients,
    computing: PartyState,
    decryptor: PartyState,
    net: Network,
) -> tuple[np.ndarray, np.ndarray]:
    """Split gradient ingredients into two additive shares across the wire.

    The computing party subtracts fresh masks before anything leaves its
    hands; the key owner decrypts blind.  Returns (computing party's share,
    decryptor's share), both length-n residues mod t.
    """
    params = backend.params
    t = params.plain_modulus
    src, dst = computing.role, decryptor.role
    n_out = ingredients.n_out

    share_src = np.zeros(n_out, dtype=np.int64)
    share_dst = np.zeros(n_out, dtype=np.int64)
    if ingredients.pending is not None:
        masked, masks = [], []
        for ct in ingredients.pending.ciphertexts:
            rho = uniform_mod(computing.rng, t, params.slot_count)
            mct = backend.o1_add(backend.encode_raw((-rho) % t, ct.scale_exponent), ct)
            masked.append(mct)
            masks.append(rho)
        plan = ingredients.pending.reduction_plan
        net.send(src, dst, "rlwe_ct", (masked, plan), count=len(masked))

        cts, wire_plan = net.recv(dst, src).payload
        decrypted = [backend.decrypt(ct).slots for ct in cts]
        share_dst = mm.finalize_lazy_ras(decrypted, wire_plan, modulus=t)[:n_out]
        share_src = mm.finalize_lazy_ras(masks, plan, modulus=t)[:n_out]
    if ingredients.clear_expanded is not None:
        folded = forward_ras_cleartext(
            ingredients.clear_expanded, ingredients.ras_rounds, t
        )
        share_src = (share_src + folded[:n_out]) % t
    return share_src, share_dst


def caesar_train_iteration(
    backend: SimdBackend,
    state_a: PartyState,
    state_b: PartyState,
    dealer: IdealDealer,
    batch: np.ndarray,
    net: Network,
    cfg: TrainingConfig,
) -> IterationStats:
    """One logistic-regression SGD step with secret-shared weights.

    Share bookkeeping: A holds <w_A>_1 and <w_B>_1 plus [[<w_A>_2]] under
    B's key; B holds the mirror image.  Each linear layer is therefore one
    ciphertext product plus one local cleartext product, and each gradient
    is produced by the feature owner on an assembled [[z]] / [[z^3]] pair
    and re-split before it travels.
    """
    params = backend.params
    t = params.plain_modulus
    delta = float(params.scale)
    sigmoid = cfg.sigmoid
    x_a = state_a.features[batch]
    x_b = state_b.features[batch]
    y = state_b.labels[batch]
    m = len(batch)
    stats = IterationStats()

    with MeasurementScope() as iteration_scope:
        # z = X_A w_A + X_B w_B at scale 2, additively shared.
        fw_a, st_a = caesar_forward(backend, state_a, state_b, net, x=x_a)
        clear_a = share_matvec_cleartext(
            to_fixed(x_a, params.scale, t), state_a.weight_share, t
        )
        fw_b, st_b = caesar_forward(backend, state_b, state_a, net, x=x_b)
        clear_b = share_matvec_cleartext(
            to_fixed(x_b, params.scale, t), state_b.weight_share, t
        )
        stats.ops.update(st_a.ops)
        stats.ops.update(st_b.ops)
        z2 = Shares(
            (fw_a.share1 + fw_b.share2 + clear_a) % t,
            (fw_a.share2 + fw_b.share1 + clear_b) % t,
            t,
        )
        z1 = dealer.affine_rescale(z2, div=delta)
        z3 = dealer.cube(z1)

        # g_B = X_B^T e under A's key: B computes, A blind-decrypts.
        enc_z1 = mm.encrypt_vector(backend, z1.share1, "hoisted", state_a.key_id, raw=True)
        enc_z31 = mm.encrypt_vector(backend, z3.share1, "hoisted", state_a.key_id, raw=True)
        net.send("A", "B", "rlwe_ct", (enc_z1, enc_z31), count=2)
        pair = net.recv("B", "A").payload
        z_ct = assemble_shared_ct(backend, pair[0], z1.share2, m)
        z3_ct = assemble_shared_ct(backend, pair[1], z3.share2, m)
        with MeasurementScope() as grad_b_scope:
            ing_b = caesar_gradient_mlr(
                backend, z_ct, z3_ct, x_b, y, sigmoid=sigmoid, rng=state_b.rng
            )
        stats.ops["gradient_B"] = measure(grad_b_scope)[0]
        gb_2, gb_1 = exchange_masked_gradient(backend, ing_b, state_b, state_a, net)
        g_b = Shares(gb_1, gb_2, t)

        # g_A = X_A^T e under B's key: labels stay with B, so the constant
        # term arrives pre-encrypted instead of in cleartext.
        enc_z2 = mm.encrypt_vector(backend, z1.share2, "hoisted", state_b.key_id, raw=True)
        enc_z32 = mm.encrypt_vector(backend, z3.share2, "hoisted", state_b.key_id, raw=True)
        const_ct = mm.encrypt_vector(
            backend,
            to_fixed(sigmoid.q0 - np.asarray(y, dtype=np.float64), params.scale, t),
            "hoisted",
            state_b.key_id,
            raw=True,
        )
        net.send("B", "A", "rlwe_ct", (enc_z2, enc_z32, const_ct), count=3)
        triple = net.recv("A", "B").payload
        z_ctb = assemble_shared_ct(backend, triple[0], z1.share1, m)
        z3_ctb = assemble_shared_ct(backend, triple[1], z3.share1, m)
        cct = triple[2]
        if isinstance(cct, list):
            cct = cct[0]
        with MeasurementScope() as grad_a_scope:
            ing_a = caesar_gradient_mlr(
                backend, z_ctb, z3_ctb, x_a, None, sigmoid=sigmoid, const_ct=cct
            )
        stats.ops["gradient_A"] = measure(grad_a_scope)[0]
        ga_1, ga_2 = exchange_masked_gradient(backend, ing_a, state_a, state_b, net)
        g_a = Shares(ga_1, ga_2, t)

        # w <- w - (lr / m) g, share-wise, back at weight scale.
        step = cfg.learning_rate / m
        d_a = dealer.affine_rescale(g_a, mul=step, div=delta)
        d_b = dealer.affine_rescale(g_b, mul=step, div=delta)
        state_a.weight_share = (state_a.weight_share - d_a.share1) % t
        state_b.peer_weight_share = (state_b.peer_weight_share - d_a.share2) % t
        state_b.weight_share = (state_b.weight_share - d_b.share2) % t
        state_a.peer_weight_share = (state_a.peer_weight_share - d_b.share1) % t

        # Refresh the encrypted copies for the next iteration's forwards.
        enc_wa2 = mm.encrypt_vector(
            backend, state_b.peer_weight_share, "hoisted", state_b.key_id, raw=True
        )
        net.send("B", "A", "rlwe_ct", enc_wa2, count=1)
        state_a.enc_weight_share = net.recv("A", "B").payload
        enc_wb1 = mm.encrypt_vector(
            backend, state_a.peer_weight_share, "hoisted", state_a.key_id, raw=True
        )
        net.send("A", "B", "rlwe_ct", enc_wb1, count=1)
        state_b.enc_weight_share = net.recv("B", "A").payload

    stats.comm = measure(iteration_scope)[1]
    stats.levels_consumed = {
        "grad_a": ing_a.levels_consumed,
        "grad_b": ing_b.levels_consumed,
    }

    # Simulator-level metrics: reconstruct and score with the true sigmoid.
    # The cubic surrogate only drives the updates; the reported loss uses the
    # model being approximated so it is comparable across trainers.
    w_a = center(reconstruct(Shares(state_a.weight_share, state_b.peer_weight_share, t)), t) / delta
    w_b = center(reconstruct(Shares(state_a.peer_weight_share, state_b.weight_share, t)), t) / delta
    z_val = x_a @ w_a + x_b @ w_b
    p = np.clip(1.0 / (1.0 + np.exp(-z_val)), 1e-9, 1.0 - 1e-9)
    stats.loss = float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
    stats.extras["w_a"] = w_a
    stats.extras["w_b"] = w_b
    return stats


def caesar_init_states(
    backend: SimdBackend,
    *,
    features_a: np.ndarray,
    features_b: np.ndarray,
    labels: np.ndarray,
    w_a: np.ndarray,
    w_b: np.ndarray,
    key_a: int,
    key_b: int,
    seed: int = 0,
) -> tuple[PartyState, PartyState]:
    """Distribute weight shares and encrypted copies for training.

    Both weight vectors start secret-shared: each party keeps one half of
    each, and additionally holds the peer's half of its *own* model
    encrypted under the peer's key, ready for the ciphertext forward.
    """
    params = backend.params
    t = params.plain_modulus
    rng = np.random.default_rng(seed)
    sh_wa = secret_share(to_fixed(w_a, params.scale, t), t, rng)
    sh_wb = secret_share(to_fixed(w_b, params.scale, t), t, rng)
    state_a = PartyState(
        role="A",
        rng=np.random.default_rng(seed + 101),
        features=np.asarray(features_a, dtype=np.float64),
        weight_share=sh_wa.share1,
        peer_weight_share=sh_wb.share1,
        enc_weight_share=mm.encrypt_vector(backend, sh_wa.share2, "hoisted", key_b, raw=True),
        key_id=key_a,
    )
    state_b = PartyState(
        role="B",
        rng=np.random.default_rng(seed + 202),
        features=np.asarray(features_b, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.float64),
        weight_share=sh_wb.share2,
        peer_weight_share=sh_wa.share2,
        enc_weight_share=mm.encrypt_vector(backend, sh_wb.share1, "hoisted", key_a, raw=True),
        key_id=key_b,
    )
    return state_a, state_b
