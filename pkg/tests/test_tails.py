import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multibase.errors import DomainError
from multibase.model import BaseSystem
from multibase.saddle import F, GFKind
from multibase.tails import (
    C_TAIL,
    sigma_sum,
    sigma_sum_exact,
    tail_point,
    tail_ratio,
    verify_tail_bounds,
    y_grid,
)

y_values = st.fractions(min_value=Fraction(-1, 2), max_value=Fraction(1, 2), max_denominator=5000)
r_values = st.sampled_from([0.05, 0.01, 0.003, 0.001])


def test_sigma_examples(s23):
    assert sigma_sum(s23, 0.01, 0) == 0
    assert sigma_sum_exact(s23, 0.01, 0.5) == Fraction(5, 4)


@given(r_values, y_values)
def test_sigma_even_and_monotone(r, y):
    s = BaseSystem((2, 3), 2)
    assert sigma_sum_exact(s, r, y) == sigma_sum_exact(s, r, -y)
    assert sigma_sum_exact(s, r / 10, y) >= sigma_sum_exact(s, r, y)


def test_sigma_brute_force(s235):
    y = Fraction(7, 60)
    want = sum(min((h * y) % 1, 1 - (h * y) % 1) ** 2
               for h in range(1, 1001) if s235.contains(h))
    assert sigma_sum_exact(s235, 1e-3, y) == want


def test_ratio_examples(s23):
    assert tail_ratio(s23, F, 0.01, 0) == 1.0
    assert tail_ratio(s23, F, 0.01, 0.5) <= math.exp(-C_TAIL * 1.25)


@settings(max_examples=40, deadline=None)
@given(r_values, y_values, st.sampled_from(["F", "G", "H:1"]), st.floats(0.5, 2.0))
def test_ratio_at_most_one_and_lemma(r, y, kind, u):
    s = BaseSystem((2, 3), 2)
    ratio = tail_ratio(s, GFKind.parse(kind), r, y, u)
    assert 0 <= ratio <= 1 + 1e-12
    p = tail_point(s, r, y, u, GFKind.parse(kind))
    assert p.lemma2_ok


def test_ratio_against_direct_product():
    # small system, moderate r: the product converges fast enough to
    # compare with a long plain-complex loop
    s = BaseSystem((2, 3), 3)
    r, y, u = 0.05, Fraction(3, 7), 1.3
    ex = GFKind("F").exponents(3)
    num = den = 1.0
    h = 1
    for h in range(1, 20000):
        if not s.contains(h):
            continue
        z = complex(math.exp(-h * r) * math.cos(2 * math.pi * h * 3 / 7),
                    math.exp(-h * r) * math.sin(2 * math.pi * h * 3 / 7))
        num *= abs(sum(u**e * z**a for a, e in enumerate(ex)))
        den *= sum(u**e * math.exp(-a * h * r) for a, e in enumerate(ex))
    assert tail_ratio(s, F, r, y, u) == pytest.approx(num / den, rel=1e-10)


def test_domain(s23):
    with pytest.raises(DomainError):
        sigma_sum(s23, 0.01, 0.7)
    with pytest.raises(DomainError):
        tail_ratio(s23, F, 0.0, 0.1)
    with pytest.raises(DomainError):
        verify_tail_bounds(s23, [0.1])


def test_grid_contents():
    grid = y_grid(1e-3, 1024, 64)
    assert Fraction(1, 2) in grid and Fraction(-1, 2) in grid and 0 in grid
    assert Fraction(1, 64) in grid and Fraction(-5, 63) in grid
    assert Fraction(1, 2000) in grid
    assert grid == sorted(set(grid))


def test_verify_small_grid(s23):
    rep = verify_tail_bounds(s23, [1e-2, 1e-3], y_resolution=64, max_denominator=16)
    assert rep.violations == 0
    assert rep.fitted_A1 > 0 and rep.fitted_A2 > 0
    assert rep.C == C_TAIL
    assert [p["r"] for p in rep.per_r] == [1e-2, 1e-3]
    assert all(p["min_margin"] >= 1 for p in rep.per_r)


def test_fitted_constants_stable(s23, s235):
    rep = verify_tail_bounds(s23, [1e-2, 1e-3, 1e-4])
    assert rep.violations == 0 and rep.fitted_A2 > 0
    for key in ("fitted_A1", "fitted_A2"):
        vals = [p[key] for p in rep.per_r]
        assert max(vals) / min(vals) <= 3
    assert verify_tail_bounds(s235, [1e-3]).violations == 0
