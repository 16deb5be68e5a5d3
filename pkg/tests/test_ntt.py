"""Number-theoretic transform against the quadratic-time reference."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hevfl.errors import BadModulus
from hevfl.rlwe.ntt import (
    NttContext,
    find_ntt_prime,
    get_ntt_context,
    is_prime,
    rns_primes,
)

import oracles

P_16 = find_ntt_prime(31, 32)  # any prime == 1 (mod 2*16) works for N=16


def test_is_prime_small_cases():
    primes = [n for n in range(2, 60) if is_prime(n)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
    assert not is_prime(1) and not is_prime(0)


def test_find_ntt_prime_congruence():
    for two_n in (16, 32, 128, 2048):
        p = find_ntt_prime(31, two_n)
        assert is_prime(p) and p % two_n == 1 and p < 2**31


def test_rns_primes_distinct_and_congruent():
    primes = rns_primes(3, 2048)
    assert len(set(primes)) == 3
    assert all(p % 2048 == 1 for p in primes)


def test_rns_primes_exhaustion():
    # only finitely many primes below 2**8; asking for too many must fail loud
    with pytest.raises(BadModulus):
        rns_primes(50, 64, bits=8)


def test_forward_inverse_roundtrip(rng):
    ctx = get_ntt_context(P_16, 16)
    a = rng.integers(0, P_16, 16)
    np.testing.assert_array_equal(ctx.intt(ctx.ntt(a)), a % P_16)


def test_negacyclic_mult_matches_schoolbook_random(rng):
    ctx = NttContext(P_16, 16)
    for _ in range(25):
        a = rng.integers(0, P_16, 16)
        b = rng.integers(0, P_16, 16)
        np.testing.assert_array_equal(
            ctx.negacyclic_mult(a, b), oracles.schoolbook_negacyclic(a, b, P_16)
        )


def test_x_times_x_to_the_n_minus_one_wraps_negative():
    """X * X^(N-1) = X^N == -1 in Z_p[X]/(X^N + 1)."""
    ctx = get_ntt_context(P_16, 16)
    a = np.zeros(16, dtype=np.int64)
    b = np.zeros(16, dtype=np.int64)
    a[1] = 1
    b[15] = 1
    out = ctx.negacyclic_mult(a, b)
    want = np.zeros(16, dtype=np.int64)
    want[0] = P_16 - 1
    np.testing.assert_array_equal(out, want)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=5),  # log2 of the ring degree
    st.integers(min_value=0, max_value=2**32),
)
def test_negacyclic_mult_matches_schoolbook_all_degrees(logn, seed):
    n = 1 << logn
    p = find_ntt_prime(20, 2 * n)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, n)
    b = rng.integers(0, p, n)
    got = get_ntt_context(p, n).negacyclic_mult(a, b)
    np.testing.assert_array_equal(got, oracles.schoolbook_negacyclic(a, b, p))


def test_context_cache_returns_same_object():
    assert get_ntt_context(P_16, 16) is get_ntt_context(P_16, 16)


def test_mul_is_pointwise_in_transform_domain(rng):
    """ntt(a (*) b) equals the slot-wise product of the transforms — the
    convolution theorem for the negacyclic ring."""
    ctx = get_ntt_context(P_16, 16)
    a = rng.integers(0, P_16, 16)
    b = rng.integers(0, P_16, 16)
    lhs = ctx.ntt(ctx.negacyclic_mult(a, b))
    rhs = ctx.mul(ctx.ntt(a), ctx.ntt(b))
    np.testing.assert_array_equal(lhs, rhs)
