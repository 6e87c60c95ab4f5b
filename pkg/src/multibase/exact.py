"""Exact counts of representations, statistic moments and distributions.

All quantities are coefficients of

    F(z, u) = prod_{h in S} (1 + u^s(1) z^h + ... + u^s(d-1) z^((d-1)h))

where ``s`` is the per-digit weight of the statistic.  Tables are built
modulo several word-size primes (see ``_modular``) and lifted to exact
Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _modular as mod
from .errors import DomainError, OracleLimitExceeded, OutOfMemory
from .model import BaseSystem, Statistic
from .smooth import elements_upto

ORACLE_LIMIT = 500
DISTRIBUTION_LIMIT = 10**6


def log_int(x: int) -> float:
    """Natural log of a positive integer of any size."""
    if x <= 0:
        raise DomainError(f"log of non-positive integer {x}")
    shift = x.bit_length() - 64
    if shift <= 0:
        return math.log(x)
    return math.log(x >> shift) + shift * math.log(2)


def _count_bits_bound(system: BaseSystem, N: int) -> float:
    # every element h <= N carries one of min(d, N//h + 1) digits
    d = system.digit_bound
    return sum(math.log2(min(d, N // h + 1)) for h in elements_upto(system.bases, N))


def _lifted_bytes(N: int, bits: float) -> float:
    return (N + 1) * (40 + bits / 8)


@dataclass(frozen=True)
class CountTable:
    system: BaseSystem
    limit: int
    counts: tuple[int, ...]

    def __getitem__(self, n):
        return self.counts[n]

    def __len__(self):
        return len(self.counts)

    def log(self, n: int) -> float:
        return log_int(self.counts[n])


def build_count_table(system: BaseSystem, N: int, method: str = "sliding") -> CountTable:
    """P(0), ..., P(N) by the bounded-multiplicity partition DP.

    ``method="naive"`` multiplies in each factor digit by digit instead of
    using the (1 - z^(dh)) / (1 - z^h) sliding form; it exists to check
    the sliding kernel.
    """
    N = int(N)
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    bits = _count_bits_bound(system, N)
    primes = mod.primes_for_bits(bits)
    mod.check_memory(len(primes) * (N + 1) * 8 + _lifted_bytes(N, bits),
                     f"count table up to {N}")
    items = np.array(elements_upto(system.bases, N), dtype=np.int64)
    ps = np.array(primes, dtype=np.int64)
    res = np.zeros((len(primes), N + 1), dtype=np.int64)
    res[:, 0] = 1
    if method == "sliding":
        mod.count_sliding(res, items, system.digit_bound, ps)
    elif method == "naive":
        mod.count_naive(res, items, system.digit_bound, ps)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountTable(system, N, tuple(mod.crt_lift(res, primes)))


def count_brute_force(system: BaseSystem, n: int, limit: int = ORACLE_LIMIT) -> int:
    """Count representations of ``n`` by recursive digit assignment.

    Elements are visited from the largest down; a branch dies as soon as
    the remaining value exceeds what the smaller elements can still
    cover.  Subresults are memoised on (element index, remaining value).
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > limit:
        raise OracleLimitExceeded(f"brute force limited to n <= {limit}, got {n}")
    items = elements_upto(system.bases, n) if n else []
    d = system.digit_bound
    # reach[k]: largest value representable with items[0..k]
    reach = []
    acc = 0
    for h in items:
        acc += (d - 1) * h
        reach.append(acc)

    @lru_cache(maxsize=None)
    def go(k: int, rest: int) -> int:
        if rest == 0:
            return 1
        if k < 0 or rest > reach[k]:
            return 0
        h = items[k]
        total = 0
        for a in range(min(d - 1, rest // h) + 1):
            total += go(k - 1, rest - a * h)
        return total

    return go(len(items) - 1, n)


def enumerate_representations(system: BaseSystem, n: int, limit: int = 200):
    """Yield every representation of ``n`` (small ``n`` only)."""
    if n > limit:
        raise OracleLimitExceeded(f"enumeration limited to n <= {limit}, got {n}")
    items = elements_upto(system.bases, n) if n else []
    d = system.digit_bound

    def go(k, rest, chosen):
        if rest == 0:
            yield system.representation(reversed(chosen))
            return
        if k < 0:
            return
        h = items[k]
        for a in range(min(d - 1, rest // h), -1, -1):
            if a:
                chosen.append((h, a))
            yield from go(k - 1, rest - a * h, chosen)
            if a:
                chosen.pop()

    yield from go(len(items) - 1, n, [])


def count_via_power_partition(q: int, p: int, N: int) -> list[int]:
    """Partitions of 0..N into powers of ``p``.

    These are in bijection with representations in the system with bases
    {q, p} and digits 0..q-1: group the terms by power of ``p`` and read
    each group as a base-``q`` numeral.
    """
    q, p, N = int(q), int(p), int(N)
    if q < 2 or p < 2 or math.gcd(q, p) != 1:
        raise DomainError(f"need coprime q, p >= 2, got q={q}, p={p}")
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    c = [1] * (N + 1)
    for n in range(1, N + 1):
        c[n] = c[n - 1] + c[n // p] if n % p == 0 else c[n - 1]
    return c


@dataclass(frozen=True)
class MomentTable:
    """Per-n sums over all representations of 1, stat and stat**2."""

    system: BaseSystem
    statistic: Statistic
    limit: int
    A: tuple[int, ...]
    B: tuple[int, ...]
    C: tuple[int, ...]

    def mean(self, n: int) -> Fraction:
        return Fraction(self.B[n], self.A[n])

    def variance(self, n: int) -> Fraction:
        mu = self.mean(n)
        return Fraction(self.C[n], self.A[n]) - mu * mu


def _max_statistic(system: BaseSystem, n: int, stat: Statistic) -> int:
    # Greedy over unit costs: every unit of the statistic costs at least
    # min_{a: s(a) > 0} a*h / s(a) at element h.
    costs = []
    wts = stat.weights(system.digit_bound)
    for h in elements_upto(system.bases, n):
        for a in range(1, system.digit_bound):
            s = wts[a]
            if s:
                per_unit = a * h / s
                costs.extend([per_unit] * s)
                break
        if stat.kind == "sum":
            costs.extend([h] * (system.digit_bound - 2))
    costs.sort()
    total, k = 0.0, 0
    for c in costs:
        if total + c > n:
            break
        total += c
        k += 1
    return k


def build_moment_tables(system: BaseSystem, N: int, stat: Statistic) -> MomentTable:
    N = int(N)
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    stat.check(system)
    smax = max(1, _max_statistic(system, N, stat))
    bits = _count_bits_bound(system, N) + 2 * math.log2(smax + 1)
    primes = mod.primes_for_bits(bits)
    mod.check_memory(3 * (len(primes) * (N + 1) * 8 + _lifted_bytes(N, bits)),
                     f"moment tables up to {N}")
    items = np.array(elements_upto(system.bases, N), dtype=np.int64)
    ps = np.array(primes, dtype=np.int64)
    wts = np.array(stat.weights(system.digit_bound), dtype=np.int64)
    A = np.zeros((len(primes), N + 1), dtype=np.int64)
    A[:, 0] = 1
    B = np.zeros_like(A)
    C = np.zeros_like(A)
    mod.moment_update(A, B, C, items, wts, ps)
    return MomentTable(system, stat, N,
                       tuple(mod.crt_lift(A, primes)),
                       tuple(mod.crt_lift(B, primes)),
                       tuple(mod.crt_lift(C, primes)))


@dataclass(frozen=True)
class Distribution:
    """Exact number of representations of ``n`` for each statistic value."""

    system: BaseSystem
    statistic: Statistic
    n: int
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def moment(self, k: int) -> Fraction:
        return Fraction(sum(c * v**k for v, c in self.counts.items()), self.total)

    def mean(self) -> Fraction:
        return self.moment(1)

    def central_moment(self, k: int) -> Fraction:
        mu = self.mean()
        return sum((Fraction(v) - mu) ** k * c for v, c in self.counts.items()) / self.total

    def variance(self) -> Fraction:
        return self.central_moment(2)

    def probabilities(self) -> dict:
        tot = self.total
        return {v: c / tot for v, c in sorted(self.counts.items())}


def exact_distribution(system: BaseSystem, n: int, stat: Statistic,
                       limit: int = DISTRIBUTION_LIMIT,
                       table: CountTable | None = None) -> Distribution:
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > limit:
        raise OutOfMemory(f"distribution limited to n <= {limit}, got {n}")
    stat.check(system)
    kmax = _max_statistic(system, n, stat)
    mod.check_memory((n + 1) * (kmax + 1) * 8, f"distribution table for n={n}")
    if table is None or table.limit < n:
        table = build_count_table(system, n)
    total = table[n]
    primes = mod.primes_for_bits(total.bit_length())
    items = np.array(elements_upto(system.bases, n) if n else [], dtype=np.int64)
    wts = np.array(stat.weights(system.digit_bound), dtype=np.int64)
    res = np.empty((len(primes), kmax + 1), dtype=np.int64)
    for j, p in enumerate(primes):
        D = np.zeros((n + 1, kmax + 1), dtype=np.int64)
        D[0, 0] = 1
        mod.distribution_update(D, items, wts, p)
        res[j] = D[n]
        del D
    values = mod.crt_lift(res, primes)
    counts = {k: c for k, c in enumerate(values) if c}
    out = Distribution(system, stat, n, counts)
    if out.total != total:
        raise ArithmeticError(f"distribution total {out.total} != P({n}) = {total}")
    return out


def position_digit_counts(table: CountTable, n: int, s: int) -> list[int]:
    """Number of representations of ``n`` whose digit at element ``s`` is b, for each b.

    Dividing out the factor of ``s`` leaves the counts G of representations
    avoiding ``s``: G(v) = P(v) - P(v - s) + G(v - d*s).
    """
    system = table.system
    if not system.contains(s):
        raise DomainError(f"{s} is not an element of S")
    if n > table.limit:
        raise DomainError(f"table only reaches {table.limit}")
    d = system.digit_bound
    P = table.counts
    G = [0] * (n + 1)
    for v in range(n + 1):
        g = P[v]
        if v >= s:
            g -= P[v - s]
        if v >= d * s:
            g += G[v - d * s]
        G[v] = g
    return [G[n - b * s] if n >= b * s else 0 for b in range(d)]
