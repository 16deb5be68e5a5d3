"""Split-network training over an uploaded encrypted embedding."""

import numpy as np
import pytest

import oracles
from hevfl.errors import MissingConvertedTranspose, ShapeMismatch
from hevfl.fixedpoint import from_fixed
from hevfl.netsim import Network
from hevfl.params import CostModel, semantic_params
from hevfl.protocols import nn
from hevfl.simd import SemanticBackend


def make_states(rows=4, n_a=4, n_b=3, hidden=2, slots=4, seed=0):
    rng = np.random.default_rng(seed)
    backend = SemanticBackend(semantic_params(slots))
    x_a = rng.uniform(-1, 1, size=(rows, n_a))
    x_b = rng.uniform(-1, 1, size=(rows, n_b))
    y = rng.integers(0, 2, size=rows).astype(np.float64)
    a, b = nn.nn_init_states(backend, features_a=x_a, features_b=x_b, labels=y,
                             hidden_units=hidden, key_a=backend.keygen(), seed=seed)
    return backend, a, b


def unmask(backend, masked, eps):
    t = backend.params.plain_modulus
    return from_fixed((masked - eps) % t, backend.params.scale, t, scale_exponent=2)


def test_forward_unmasks_to_embedding_product():
    backend, a, b = make_states()
    with Network(CostModel()) as net:
        z_masked, stats = nn.vfl_nn_forward(backend, a, b, np.arange(4), net)
    got = unmask(backend, z_masked, b.mask_ledger["eps_forward"])
    want = a.features @ b.interactive_weights
    np.testing.assert_allclose(got, want, atol=2.0**-10)
    # the wire value itself is uniformly masked: nowhere near the product
    assert not np.allclose(z_masked % backend.params.plain_modulus,
                           got, atol=1.0)


def test_identity_weights_return_the_embedding():
    backend, a, b = make_states(hidden=4)
    b.interactive_weights = np.eye(4)
    with Network(CostModel()) as net:
        z_masked, _ = nn.vfl_nn_forward(backend, a, b, np.arange(4), net)
    got = unmask(backend, z_masked, b.mask_ledger["eps_forward"])
    np.testing.assert_allclose(got, a.features, atol=2.0**-12)


def test_forward_and_backward_book_zero_rotations():
    backend, a, b = make_states()
    with Network(CostModel()) as net:
        _, st_f = nn.vfl_nn_forward(backend, a, b, np.arange(4), net)
        _, st_b = nn.vfl_nn_backward(backend, a, b,
                                     np.full((4, 2), 0.25), net)
    fwd = st_f.ops["nn_forward_matmult"]
    bwd = st_b.ops["nn_backward_matmult"]
    assert fwd.rot == 0 and fwd.hst_rot == 0
    assert bwd.rot == 0 and bwd.hst_rot == 0
    assert fwd.mult > 0 and bwd.mult > 0


def test_backward_matches_transposed_product(rng):
    backend, a, b = make_states(seed=4)
    delta = rng.uniform(-0.5, 0.5, size=(4, 2))
    with Network(CostModel()) as net:
        nn.vfl_nn_forward(backend, a, b, np.arange(4), net)
        g_masked, _ = nn.vfl_nn_backward(backend, a, b, delta, net)
    got = unmask(backend, g_masked, b.mask_ledger["eps_backward"])
    np.testing.assert_allclose(got, a.features.T @ delta, atol=2.0**-10)


def test_zero_activation_gradient_unmasks_to_zero():
    backend, a, b = make_states()
    with Network(CostModel()) as net:
        nn.vfl_nn_forward(backend, a, b, np.arange(4), net)
        g_masked, _ = nn.vfl_nn_backward(backend, a, b, np.zeros((4, 2)), net)
    got = unmask(backend, g_masked, b.mask_ledger["eps_backward"])
    np.testing.assert_array_equal(got, 0.0)
    assert (g_masked % backend.params.plain_modulus).any()  # still masked


def test_backward_requires_prior_conversion():
    backend, a, b = make_states()
    with Network(CostModel()) as net:
        with pytest.raises(MissingConvertedTranspose):
            nn.vfl_nn_backward(backend, a, b, np.zeros((4, 2)), net)


def test_weight_rows_must_match_embedding_columns():
    backend, a, b = make_states()
    b.interactive_weights = np.zeros((5, 2))
    with Network(CostModel()) as net:
        with pytest.raises(ShapeMismatch):
            nn.vfl_nn_forward(backend, a, b, np.arange(4), net)


def test_embedding_uploads_once_per_batch():
    """Both passes of an iteration ride on the single diagonal upload; a new
    batch requires exactly one more."""
    backend, a, b = make_states(rows=8, slots=8)
    with Network(CostModel()) as net:
        for batch in (np.arange(4), np.arange(4, 8)):
            nn.vfl_nn_train_iteration(backend, a, b, batch, net, lr=0.1)
        uploads = [r for r in net.transcript
                   if r["sender"] == "A" and r["kind"] == "rlwe_ct"]
    assert len(uploads) == 2  # one per batch, none for the backward passes


def test_training_tracks_reference_losses_and_weights():
    backend, a, b = make_states(rows=8, slots=8, seed=21)
    w_int = b.interactive_weights.copy()
    w_own = b.weights.copy()
    w_top = b.top_weights.copy()
    batches = [np.arange(4), np.arange(4, 8)] * 3
    want_losses, want_int, want_own, want_top = oracles.split_nn_sgd(
        a.features, b.features, b.labels, w_int, w_own, w_top, 0.25, batches)
    got_losses = []
    with Network(CostModel()) as net:
        for batch in batches:
            stats = nn.vfl_nn_train_iteration(backend, a, b, batch, net, lr=0.25)
            got_losses.append(stats.loss)
    np.testing.assert_allclose(got_losses, want_losses, atol=1e-2)
    np.testing.assert_allclose(b.interactive_weights, want_int, atol=1e-3)
    np.testing.assert_allclose(b.weights, want_own, atol=1e-3)
    np.testing.assert_allclose(b.top_weights, want_top, atol=1e-3)
