import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from slidingbloom import (
    INFINITE,
    InvalidParams,
    derive,
    lower_bound_bits,
    upper_bound_bits,
)

U64 = 2**64


def test_derive_reference_values():
    p = derive(1000, 1000, 2**-10, U64)
    assert (p.c, p.g, p.n_prime, p.fp_range, p.gen_modulus, p.tag_bits) == (
        10, 100, 1100, 1_126_400, 23, 5)

    p = derive(1000, 10, 2**-4, U64)
    assert (p.c, p.g, p.n_prime, p.fp_range, p.gen_modulus, p.tag_bits) == (
        100, 10, 1010, 16_160, 203, 8)

    p = derive(1000, INFINITE, 0.5, U64)
    assert (p.c, p.g, p.n_prime, p.gen_modulus) == (1, 1000, 2000, 5)


def test_upper_bound_reference_values():
    assert upper_bound_bits(1024, INFINITE, 2**-8) == 1024 * 8 + 1024 * 3
    assert upper_bound_bits(1024, 1, 0.5) == 1024 * 1 + 1024 * 10
    assert upper_bound_bits(100, 100, 2**-16) == 100 * 16 + 100 * 4


def test_lower_bound_reference_values():
    assert lower_bound_bits(1024, INFINITE, 2**-8) == 11264
    assert lower_bound_bits(1024, 1024, 2**-8) == 11264  # log2(n/m)=0 < loglog=3
    assert lower_bound_bits(2048, 2, 2**-4) == 2048 * 4 + 2048 * 10


@pytest.mark.parametrize("bad", [
    dict(n=0, m=1, epsilon=0.1, u=U64),
    dict(n=-3, m=1, epsilon=0.1, u=U64),
    dict(n=10, m=0, epsilon=0.1, u=U64),
    dict(n=10, m=1, epsilon=0.0, u=U64),
    dict(n=10, m=1, epsilon=1.0, u=U64),
    dict(n=10, m=1, epsilon=-0.5, u=U64),
    dict(n=100, m=1, epsilon=0.001, u=1000),  # n >= epsilon*u
    dict(n=10, m=1, epsilon=0.1, u=1),
])
def test_derive_rejects(bad):
    with pytest.raises(InvalidParams):
        derive(**bad)


def test_n_equal_epsilon_u_rejected():
    # boundary must be strict; 0.125 is exact in binary so eps*u == n
    with pytest.raises(InvalidParams):
        derive(100, 10, 0.125, 800)
    derive(100, 10, 0.125, 801)


def test_derive_deterministic():
    a = derive(777, 13, 0.03, U64)
    b = derive(777, 13, 0.03, U64)
    assert a == b


def test_fp_range_exact_for_awkward_epsilon():
    # 0.1 is not a binary fraction; R must be the exact ceiling w.r.t.
    # the binary value of epsilon
    p = derive(1000, 100, 0.1, U64)
    eps = Fraction(0.1)
    assert p.fp_range == -(-p.n_prime * eps.denominator // eps.numerator)
    assert Fraction(p.fp_range) >= p.n_prime / eps


@given(
    n=st.integers(1, 50_000),
    m=st.one_of(st.just(INFINITE), st.integers(1, 100_000)),
    eps_pow=st.integers(1, 30),
)
def test_derive_invariants(n, m, eps_pow):
    epsilon = 2.0**-eps_pow
    params = derive(n, m, epsilon, U64)
    params.validate()
    assert 1 <= params.c <= n
    assert params.g * params.c >= n
    if m != INFINITE:
        assert params.g <= m
    assert params.n_prime == n + params.g
    assert params.fp_range >= params.n_prime / epsilon
    assert params.gen_modulus == 2 * params.c + 3
    assert 2**params.tag_bits >= params.gen_modulus
    assert params.dict_capacity >= params.n_prime


@given(
    n=st.integers(1, 10_000),
    m=st.one_of(st.just(INFINITE), st.integers(1, 20_000)),
    epsilon=st.floats(1e-9, 0.999),
)
def test_bounds_ordering(n, m, epsilon):
    up = upper_bound_bits(n, m, epsilon)
    lo = lower_bound_bits(n, m, epsilon)
    assert up >= lo
    assert up == lo  # shared leading terms
    assert lo >= n * math.log2(1 / epsilon) - 1e-9


def test_lower_bound_monotone_grid():
    ns = [64, 256, 1024, 4096]
    ms = [1, 4, 64, 1024, INFINITE]
    eps = [2**-2, 2**-6, 2**-10, 2**-14]
    for m in ms:
        for e in eps:
            vals = [lower_bound_bits(n, m, e) for n in ns]
            assert vals == sorted(vals)  # non-decreasing in n
    for n in ns:
        for e in eps:
            vals = [lower_bound_bits(n, m, e) for m in ms if m != INFINITE]
            assert vals == sorted(vals, reverse=True)  # non-increasing in m
    for n in ns:
        for m in ms:
            vals = [lower_bound_bits(n, m, e) for e in eps]
            assert vals == sorted(vals)  # non-increasing in epsilon (eps shrinking)


@given(n=st.integers(2, 20_000), eps_pow=st.integers(1, 20))
def test_large_slack_equals_infinite(n, eps_pow):
    epsilon = 2.0**-eps_pow
    level = math.log2(1 / epsilon)
    m = max(1, math.ceil(n / level))
    assert lower_bound_bits(n, m, epsilon) == pytest.approx(
        lower_bound_bits(n, INFINITE, epsilon))
