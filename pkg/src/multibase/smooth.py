"""The multiplicative monoid S generated by the bases, listed in order."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, LimitOverflow
from .model import BaseSystem

# largest prefix we are willing to materialise as a Python list
MAX_PREFIX_LENGTH = 10_000_000


@dataclass(frozen=True)
class SPrefix:
    system: BaseSystem
    limit: int
    elements: tuple[int, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def _merge(bases: tuple[int, ...], x: int) -> list[int]:
    # Generalised Hamming-number merge: one pointer per base into the
    # output list; the next element is the smallest candidate, and every
    # pointer that produced it advances (this is the duplicate skip).
    out = [1]
    idx = [0] * len(bases)
    cand = list(bases)
    while True:
        nxt = min(cand)
        if nxt > x:
            return out
        out.append(nxt)
        for j, p in enumerate(bases):
            if cand[j] == nxt:
                idx[j] += 1
                cand[j] = out[idx[j]] * p


def generate_upto(system: BaseSystem, x: int) -> SPrefix:
    x = int(x)
    if x < 1:
        raise DomainError(f"limit must be >= 1, got {x}")
    if count_upto(system, x) > MAX_PREFIX_LENGTH:
        raise LimitOverflow(f"S up to {x} has more than {MAX_PREFIX_LENGTH} elements")
    return SPrefix(system, x, tuple(_merge(system.bases, x)))


def elements_upto(bases, x) -> list[int]:
    """Plain sorted list of S ∩ [1, x]; ``x`` may be a float."""
    x = math.floor(x)
    if x < 1:
        return []
    return _merge(tuple(bases), x)


def count_upto(system: BaseSystem, x: int) -> int:
    x = int(x)
    if x < 1:
        return 0
    return _count(system.bases, len(system.bases) - 1, x)


def _count(bases, j, x):
    if j == 0:
        k = 0
        p = bases[0]
        while x >= p:
            x //= p
            k += 1
        return k + 1
    p = bases[j]
    total = 0
    while x >= 1:
        total += _count(bases, j - 1, x)
        x //= p
    return total


def counting_upper_bound(bases, y: float) -> float:
    """Crude bound |S ∩ [1, y]| <= prod_j (log y / log p_j + 1)."""
    if y < 1:
        return 0.0
    ly = math.log(y)
    out = 1.0
    for p in bases:
        out *= ly / math.log(p) + 1.0
    return out


def cardinality_estimate(system: BaseSystem, r: float) -> float:
    """Leading term of |S ∩ [1, 1/r]| as r -> 0."""
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    m = system.m
    return math.log(1 / r) ** m / (math.factorial(m) * math.prod(system.log_bases))


def sieve_upto(bases, x: int) -> list[int]:
    """Divisibility sieve, used as an independent check of the merge."""
    out = []
    for k in range(1, x + 1):
        q = k
        for p in bases:
            while q % p == 0:
                q //= p
        if q == 1:
            out.append(k)
    return out
