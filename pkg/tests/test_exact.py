from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multibase.errors import DomainError, OracleLimitExceeded, OutOfMemory
from multibase.exact import (
    build_count_table,
    build_moment_tables,
    count_brute_force,
    count_via_power_partition,
    enumerate_representations,
    exact_distribution,
    position_digit_counts,
)
from multibase.model import BaseSystem, Statistic, statistic_value
from multibase.smooth import elements_upto

SYSTEMS = [((2, 3), 2), ((2, 3), 3), ((2, 3, 5), 2), ((3, 5), 4), ((2, 5), 3)]


def test_count_examples(s23):
    table = build_count_table(s23, 10)
    assert table[0] == 1 and table[1] == 1
    assert table[6] == 3 and table[10] == 5
    assert count_brute_force(BaseSystem((2, 3), 3), 4) == 4
    assert count_brute_force(BaseSystem((2, 3, 5), 2), 5) == 3


def test_enumeration_lists_the_representations(s23):
    reps = {r.terms for r in enumerate_representations(s23, 10)}
    assert reps == {((1, 1), (9, 1)), ((2, 1), (8, 1)), ((4, 1), (6, 1)),
                    ((1, 1), (3, 1), (6, 1)), ((1, 1), (2, 1), (3, 1), (4, 1))}


@pytest.mark.parametrize("bases,d", SYSTEMS)
def test_sliding_and_naive_agree(bases, d):
    system = BaseSystem(bases, d)
    assert build_count_table(system, 2000).counts == build_count_table(system, 2000, "naive").counts


@pytest.mark.parametrize("bases,d", SYSTEMS)
def test_enumeration_counts(bases, d):
    system = BaseSystem(bases, d)
    table = build_count_table(system, 60)
    for n in range(61):
        reps = list(enumerate_representations(system, n))
        assert len(reps) == table[n]
        assert all(r.value == n for r in reps)
        assert len({r.terms for r in reps}) == len(reps)


def test_power_partition_examples(s23):
    c = count_via_power_partition(2, 3, 10)
    assert c[0] == 1 and c[3] == 2 and c[6] == 3
    assert c == list(build_count_table(s23, 10).counts)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([(2, 3), (2, 5), (3, 4), (3, 7), (4, 5)]))
def test_power_partition_bijection(qp):
    q, p = qp
    system = BaseSystem(tuple(sorted(qp)), q)
    assert count_via_power_partition(q, p, 3000) == list(build_count_table(system, 3000).counts)


def test_large_counts_are_exact():
    # a table big enough to need several primes in the modular lift
    system = BaseSystem((2, 3), 5)
    table = build_count_table(system, 20000)
    assert table[20000].bit_length() > 62
    # independent residue check with a plain digit-by-digit DP
    p = 1_000_003
    row = [1] + [0] * 20000
    for h in elements_upto((2, 3), 20000):
        for v in range(20000, h - 1, -1):
            row[v] = (row[v] + sum(row[v - a * h] for a in range(1, 5) if a * h <= v)) % p
    assert [c % p for c in table.counts] == row


def test_limits(s23):
    with pytest.raises(OracleLimitExceeded):
        count_brute_force(s23, 501)
    with pytest.raises(DomainError):
        build_count_table(s23, -1)
    with pytest.raises(OutOfMemory):
        exact_distribution(s23, 10**6 + 1, Statistic("sum"))


def test_memory_env(s23, monkeypatch):
    monkeypatch.setenv("MULTIBASE_MEMORY_LIMIT", "1K")
    with pytest.raises(OutOfMemory):
        build_count_table(s23, 10**4)


def test_moment_examples(s23):
    for stat in (Statistic("weight"), Statistic("sum")):
        mt = build_moment_tables(s23, 10, stat)
        assert (mt.A[6], mt.B[6], mt.C[6]) == (3, 6, 14)
        assert mt.mean(6) == 2 and mt.variance(6) == Fraction(2, 3)
        assert (mt.A[0], mt.B[0], mt.C[0]) == (1, 0, 0)


@pytest.mark.parametrize("bases,d", SYSTEMS)
@pytest.mark.parametrize("stat", ["sum", "weight", "digit:1"])
def test_moments_against_enumeration(bases, d, stat):
    system = BaseSystem(bases, d)
    stat = Statistic.parse(stat)
    mt = build_moment_tables(system, 50, stat)
    for n in range(51):
        vals = [statistic_value(r, stat) for r in enumerate_representations(system, n)]
        assert mt.A[n] == len(vals)
        assert mt.B[n] == sum(vals)
        assert mt.C[n] == sum(v * v for v in vals)


def test_distribution_examples(s23):
    w = Statistic("weight")
    assert exact_distribution(s23, 6, w).counts == {1: 1, 2: 1, 3: 1}
    assert exact_distribution(s23, 1, Statistic("sum")).counts == {1: 1}
    assert exact_distribution(s23, 10, w).counts == {2: 3, 3: 1, 4: 1}


@pytest.mark.parametrize("bases,d,stat", [((2, 3), 3, "sum"), ((3, 5), 4, "digit:2"),
                                          ((2, 3, 5), 2, "weight")])
def test_distribution_matches_moments(bases, d, stat):
    system = BaseSystem(bases, d)
    stat = Statistic.parse(stat)
    mt = build_moment_tables(system, 400, stat)
    for n in (0, 7, 123, 400):
        dist = exact_distribution(system, n, stat)
        assert dist.total == mt.A[n]
        assert dist.mean() == mt.mean(n)
        assert dist.variance() == mt.variance(n)


def test_position_digit_counts():
    system = BaseSystem((2, 3), 3)
    table = build_count_table(system, 40)
    for n in (5, 17, 40):
        for s in (1, 2, 6):
            got = position_digit_counts(table, n, s)
            reps = list(enumerate_representations(system, n))
            assert got == [sum(1 for r in reps if r.digit_at(s) == b) for b in range(3)]
            assert sum(got) == table[n]
