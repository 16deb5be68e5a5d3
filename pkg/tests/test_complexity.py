"""Closed-form complexity predictions vs. the independently derived oracle
and vs. counts measured from actually running the pipeline."""

import numpy as np
import pytest

import oracles
from hevfl import matmult as mm
from hevfl.counters import MeasurementScope
from support import make_semantic

POW2 = (2, 4, 8, 16, 32, 64)
GRID_SLOTS = (8, 64, 512)
METHODS = ("naive", "column", "gala", "hoisted", "cheetah")


def check_against_oracle(method, m, n, slots, *, eager=False):
    """Compare one prediction with the oracle; returns False if infeasible."""
    try:
        want = oracles.expected_counts(method, m, n, slots, eager=eager)
    except ValueError:
        return False
    got = mm.predict_complexity(method, m, n, slots, eager=eager)
    label = f"{method} m={m} n={n} slots={slots} eager={eager}"
    assert got.as_tuple() == want.ops, label
    assert got.ct_b_to_a == (want.cts_in, want.kind_in), label
    assert got.ct_a_to_b == (want.cts_out, want.kind_out), label
    return True


@pytest.mark.parametrize("method", METHODS)
def test_full_power_of_two_grid(method):
    checked = 0
    for m in POW2:
        for n in POW2:
            for slots in GRID_SLOTS:
                checked += check_against_oracle(method, m, n, slots)
                if method in ("gala", "hoisted"):
                    check_against_oracle(method, m, n, slots, eager=True)
    assert checked > 0  # every method must be feasible somewhere on the grid


def test_non_power_of_two_dims_pad_up():
    got = mm.predict_complexity("hoisted", 3, 5, 8)
    want = mm.predict_complexity("hoisted", 4, 8, 8)
    assert got.as_tuple() == want.as_tuple()


def test_naive_literal_4x2():
    got = mm.predict_complexity("naive", 4, 2, 8)
    assert got.as_tuple() == (7, 8, 7, 0)
    assert got.ct_b_to_a == (1, "rlwe_ct") and got.ct_a_to_b == (1, "rlwe_ct")


def test_unpacked_diagonal_literal_4x2():
    got = mm.predict_complexity("hoisted", 4, 2, 4, packed=False)
    assert got.as_tuple() == (1, 2, 0, 1)


def test_partitioned_wide_literal_4x16():
    got = mm.predict_complexity("hoisted", 4, 16, 8)
    assert got.as_tuple() == (7, 8, 0, 6)
    assert got.ct_b_to_a == (2, "rlwe_ct")
    assert got.ct_a_to_b == (1, "rlwe_ct")


def test_cheetah_literal_is_one_multiplication():
    got = mm.predict_complexity("cheetah", 5, 3, 512)
    assert got.as_tuple() == (0, 1, 0, 0)
    assert got.ct_b_to_a == (1, "rlwe_ct")
    assert got.ct_a_to_b == (5, "lwe_ct_batch")


def test_full_pack_collapse_at_64x64():
    """At 4096 slots a 64x64 product fits in one section, so the packed
    diagonal walk and its rotation-free variant predict identical work."""
    a = mm.predict_complexity("gala", 64, 64, 4096)
    b = mm.predict_complexity("hoisted", 64, 64, 4096)
    assert a.as_tuple() == b.as_tuple() == (0, 1, 0, 0)


MEASURE_CASES = [
    ("naive", 4, 2, 4, False),
    ("column", 4, 2, 4, False),
    ("gala", 4, 2, 4, False),     # auto-packed
    ("gala", 2, 4, 4, False),     # unpacked, tall-thin fold
    ("hoisted", 2, 4, 4, False),
    ("hoisted", 2, 4, 4, True),   # eager reduction books real rotations
    ("hoisted", 4, 2, 8, False),  # auto-packed
    ("hoisted", 8, 2, 4, False),  # partitioned rows
    ("hoisted", 4, 16, 8, False),  # partitioned cols
    ("hoisted", 16, 16, 8, False),  # partitioned grid
    ("cheetah", 4, 2, 8, False),
]


@pytest.mark.parametrize("method,m,n,slots,eager", MEASURE_CASES)
def test_measured_counts_equal_prediction(method, m, n, slots, eager, rng):
    be, key = make_semantic(slots)
    x = rng.integers(-8, 9, size=(m, n)).astype(np.float64)
    y = rng.integers(-8, 9, size=n).astype(np.float64)
    enc = mm.encode_for_method(method, x, be.params)
    y_ct = mm.encrypt_vector(be, y, method, key)
    with MeasurementScope() as s:
        out = mm.matmult(method, enc, y_ct, be, eager=eager)
    pred = mm.predict_complexity(method, m, n, slots, eager=eager)
    assert s.ops.as_tuple() == pred.as_tuple()
    sent = len(y_ct) if isinstance(y_ct, list) else 1
    assert sent == pred.ct_b_to_a[0]
    if isinstance(out, mm.PendingResult):
        returned = len(out.ciphertexts)
    elif isinstance(out, list):
        returned = len(out)
    else:
        returned = 1
    assert (returned, "lwe_ct_batch" if method == "cheetah" else "rlwe_ct") \
        == pred.ct_a_to_b


@pytest.mark.parametrize("method,m,n,slots,eager", MEASURE_CASES)
def test_required_offsets_suffice(method, m, n, slots, eager, rng):
    """keygen restricted to exactly the advertised rotation set must be able
    to finish the product (missing any key raises MissingGaloisKey)."""
    be = make_semantic(slots)[0]
    offs = mm.required_rot_offsets(method, m, n, slots, eager=eager)
    key = be.keygen(rot_offsets=offs)
    x = rng.integers(-8, 9, size=(m, n)).astype(np.float64)
    y = rng.integers(-8, 9, size=n).astype(np.float64)
    enc = mm.encode_for_method(method, x, be.params)
    y_ct = mm.encrypt_vector(be, y, method, key)
    mm.matmult(method, enc, y_ct, be, eager=eager)


def test_rotation_free_methods_need_no_galois_keys():
    assert mm.required_rot_offsets("column", 8, 8, 64) == set()
    assert mm.required_rot_offsets("cheetah", 8, 8, 64) == set()


def test_unknown_method_rejected():
    from hevfl.errors import EncodingMismatch

    with pytest.raises(EncodingMismatch):
        mm.predict_complexity("diagonal", 4, 4, 8)
