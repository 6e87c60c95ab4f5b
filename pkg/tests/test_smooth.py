import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multibase.errors import DomainError
from multibase.model import BaseSystem
from multibase.smooth import (
    cardinality_estimate,
    count_upto,
    elements_upto,
    generate_upto,
    sieve_upto,
)


def test_generate_examples(s23, s235):
    assert list(generate_upto(s23, 10)) == [1, 2, 3, 4, 6, 8, 9]
    assert list(generate_upto(s23, 1)) == [1]
    assert len(generate_upto(s235, 30)) == 18


def test_count_examples(s23):
    assert count_upto(s23, 10) == 7
    assert count_upto(s23, 1) == 1
    assert count_upto(s23, 1000) == len(generate_upto(s23, 1000))


@settings(max_examples=40)
@given(st.sampled_from([(2, 3), (2, 5), (3, 5, 7), (2, 3, 5), (4, 9)]), st.integers(1, 3000))
def test_merge_matches_sieve(bases, x):
    system = BaseSystem(bases, 2)
    xs = elements_upto(bases, x)
    assert xs == sieve_upto(bases, x)
    assert xs == sorted(set(xs))
    assert count_upto(system, x) == len(xs)


def test_count_large_without_listing(s23):
    # count_upto recurses over exponents, so huge limits stay cheap
    x = 10**30
    n = count_upto(s23, x)
    assert n == sum((x // 3**b).bit_length() for b in range(64) if 3**b <= x)


def test_cardinality_estimate(s23):
    assert cardinality_estimate(s23, 1e-3) == pytest.approx(31.3, abs=0.05)
    assert cardinality_estimate(s23, 1 - 1e-9) < 1e-15
    ratio = count_upto(s23, 10**6) / cardinality_estimate(s23, 1e-6)
    assert 0.8 <= ratio <= 1.3
    with pytest.raises(DomainError):
        cardinality_estimate(s23, 1.5)
