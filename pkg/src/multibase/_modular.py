"""Multi-modular table arithmetic.

Large exact tables are computed modulo several primes just below 2**31
with numba kernels and lifted back to Python integers by the Chinese
remainder theorem.  Residues stay below 2**31 so sums of a few residues,
or a residue times a small digit weight, fit in int64.
"""

from __future__ import annotations

import math
import os
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import OutOfMemory

MEMORY_ENV = "MULTIBASE_MEMORY_LIMIT"
DEFAULT_MEMORY_LIMIT = 3 * 2**30


def memory_limit() -> int:
    raw = os.environ.get(MEMORY_ENV)
    if not raw:
        return DEFAULT_MEMORY_LIMIT
    raw = raw.strip().upper()
    scale = 1
    for suffix, mult in (("K", 2**10), ("M", 2**20), ("G", 2**30)):
        if raw.endswith(suffix):
            raw, scale = raw[:-1], mult
            break
    return int(float(raw) * scale)


def check_memory(nbytes: float, what: str) -> None:
    limit = memory_limit()
    if nbytes > limit:
        raise OutOfMemory(
            f"{what} needs about {nbytes / 2**20:.0f} MiB, limit is "
            f"{limit / 2**20:.0f} MiB (set {MEMORY_ENV} to raise it)")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # bases 2, 3, 5, 7 are deterministic below 3.2e9
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _prime_list(k: int) -> tuple[int, ...]:
    out = []
    c = 2**31 - 1
    while len(out) < k:
        if _is_prime(c):
            out.append(c)
        c -= 2
    return tuple(out)


def primes_for_bits(bits: float) -> tuple[int, ...]:
    """Enough primes for their product to exceed ``2**(bits + 1)``."""
    k = max(1, math.ceil((bits + 2) / 30.99))
    return _prime_list(k)


def crt_lift(residues: np.ndarray, primes) -> list[int]:
    """Lift an array of residues of shape (k, L) to a list of L integers."""
    primes = [int(p) for p in primes]
    M = math.prod(primes)
    acc = np.zeros(residues.shape[1], dtype=object)
    for j, p in enumerate(primes):
        Mj = M // p
        acc = acc + residues[j].astype(object) * (Mj * pow(Mj, -1, p))
    return (acc % M).tolist()


def crt_lift_one(values, primes) -> int:
    primes = [int(p) for p in primes]
    M = math.prod(primes)
    x = 0
    for r, p in zip(values, primes):
        Mj = M // p
        x += int(r) * Mj * pow(Mj, -1, p)
    return x % M


@njit(cache=True)
def count_sliding(c, items, d, ps):
    """Multiply rows of ``c`` by prod_h (1 - z^(dh)) / (1 - z^h), in place."""
    n = c.shape[1] - 1
    for j in range(ps.shape[0]):
        p = ps[j]
        row = c[j]
        for h in items:
            dh = d * h
            for v in range(n, dh - 1, -1):
                x = row[v] - row[v - dh]
                if x < 0:
                    x += p
                row[v] = x
            for v in range(h, n + 1):
                x = row[v] + row[v - h]
                if x >= p:
                    x -= p
                row[v] = x


@njit(cache=True)
def count_naive(c, items, d, ps):
    """Same product as :func:`count_sliding`, one digit at a time."""
    n = c.shape[1] - 1
    for j in range(ps.shape[0]):
        p = ps[j]
        row = c[j]
        for h in items:
            for v in range(n, h - 1, -1):
                x = row[v]
                for a in range(1, d):
                    if a * h > v:
                        break
                    x += row[v - a * h]
                row[v] = x % p


@njit(cache=True)
def moment_update(A, B, C, items, wts, ps):
    """Zeroth, first and second statistic moments summed over representations.

    ``wts[a]`` is the statistic contributed by digit ``a``.  Descending
    ``v`` keeps the values at ``v - a*h`` untouched when they are read.
    """
    n = A.shape[1] - 1
    d = wts.shape[0]
    for j in range(ps.shape[0]):
        p = ps[j]
        a_row = A[j]
        b_row = B[j]
        c_row = C[j]
        for h in items:
            for v in range(n, h - 1, -1):
                xa = a_row[v]
                xb = b_row[v]
                xc = c_row[v]
                for a in range(1, d):
                    w = a * h
                    if w > v:
                        break
                    s = wts[a]
                    oa = a_row[v - w]
                    ob = b_row[v - w]
                    xa += oa
                    xb = (xb + ob + s * oa) % p
                    xc = (xc + c_row[v - w] + (2 * s * ob) % p + (s * s * oa) % p) % p
                a_row[v] = xa % p
                b_row[v] = xb
                c_row[v] = xc


@njit(cache=True)
def distribution_update(D, items, wts, p):
    """Bivariate table D[v, k] = #representations of v with statistic k."""
    n = D.shape[0] - 1
    kmax = D.shape[1] - 1
    d = wts.shape[0]
    for h in items:
        for v in range(n, h - 1, -1):
            for a in range(1, d):
                w = a * h
                if w > v:
                    break
                s = wts[a]
                src = D[v - w]
                dst = D[v]
                for k in range(s, kmax + 1):
                    x = dst[k] + src[k - s]
                    if x >= p:
                        x -= p
                    dst[k] = x
