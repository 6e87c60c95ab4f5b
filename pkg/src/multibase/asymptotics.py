"""Closed-form asymptotic predictors for P(n) and the digit statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, WrongArity
from .exact import log_int
from .model import BaseSystem, Statistic


def kappa(system: BaseSystem) -> float:
    return math.log(system.digit_bound) / (math.factorial(system.m) * math.prod(system.log_bases))


def leading_coefficient(system: BaseSystem, kind: str = "F", u: float = 1.0) -> float:
    """Coefficient of (log 1/t)^m / m! in f, g or h_b as t -> 0."""
    d = system.digit_bound
    if kind == "F":
        top = math.log(sum(u**a for a in range(d)))
    elif kind == "G":
        top = math.log(1 + (d - 1) * u)
    elif kind == "H":
        top = math.log(d - 1 + u)
    else:
        raise DomainError(f"unknown kind {kind!r}")
    return top / math.prod(system.log_bases)


def second_coefficient_at_one(system: BaseSystem) -> float:
    """f_{m-1}(1): coefficient of (log 1/t)^(m-1) / (m-1)! in f(t, 1)."""
    k = kappa(system)
    m = system.m
    return math.factorial(m - 1) * k * m * (sum(system.log_bases) - math.log(system.digit_bound)) / 2


def saddle_log_inverse(system: BaseSystem, n: float) -> float:
    """Leading terms of log(1/r0): log n - (m-1) log log n - log(f_m(1)/(m-1)!)."""
    m = system.m
    fm = leading_coefficient(system)
    ln = math.log(n)
    return ln - (m - 1) * math.log(ln) - math.log(fm / math.factorial(m - 1))


@dataclass(frozen=True)
class Theorem1Constants:
    kappa: float
    C0: float
    C1: float
    C2: float
    reduced_validity: bool  # True for m = 2, where only C0 and C1 are shared with the m=2 formula


def theorem1_constants(system: BaseSystem) -> Theorem1Constants:
    k = kappa(system)
    m = system.m
    c2 = k * m * (1 + 0.5 * sum(system.log_bases) - 0.5 * math.log(system.digit_bound)
                  - math.log(k * m))
    return Theorem1Constants(k, k, -m * (m - 1) * k, c2, m < 3)


def theorem1_log_estimate(system: BaseSystem, n: float) -> float:
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    c = theorem1_constants(system)
    ln = math.log(n)
    m = system.m
    return c.C0 * ln**m + c.C1 * ln ** (m - 1) * math.log(ln) + c.C2 * ln ** (m - 1)


@dataclass(frozen=True)
class Theorem2Constants:
    kappa: float
    K0: float
    K1: float


def theorem2_constants(system: BaseSystem) -> Theorem2Constants:
    if system.m != 2:
        raise WrongArity(f"the two-base formula needs m = 2, got m = {system.m}")
    k = kappa(system)
    lp1, lp2 = system.log_bases
    spread = lp1 + lp2 - math.log(system.digit_bound)
    K0 = 0.5 + 2 * k * (math.log(2 * k) - 0.5 * spread)
    K1 = 2 * k * (1 - math.log(2 * k) + 0.5 * spread) - 1
    return Theorem2Constants(k, K0, K1)


def theorem2_log_main(system: BaseSystem, n: float) -> float:
    """log of (log n)^K0 n^K1 exp(kappa log^2(n / log n))."""
    c = theorem2_constants(system)
    ln = math.log(n)
    return c.K0 * math.log(ln) + c.K1 * ln + c.kappa * math.log(n / ln) ** 2


def log_fluctuation_K(system: BaseSystem, n: int, P_n: int) -> float:
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    return log_int(P_n) - theorem2_log_main(system, n)


def fluctuation_K(system: BaseSystem, n: int, P_n: int) -> float:
    """P(n) divided by the non-fluctuating part of the two-base formula."""
    return math.exp(log_fluctuation_K(system, n, P_n))


def mahler_log_estimate(p: int, n: float) -> float:
    """(log n)^2 / (2 log p), the leading term of log P(p n) for bases {2, p}."""
    if p < 3:
        raise DomainError(f"p must be >= 3, got {p}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.log(n) ** 2 / (2 * math.log(p))


def pennington_log_estimate(p: int, n: float) -> float:
    """Three-term expansion of log P(p n) for bases {2, p}, digits {0, 1}."""
    if p < 3:
        raise DomainError(f"p must be >= 3, got {p}")
    if n < 16:
        raise DomainError(f"n must be >= 16, got {n}")
    lp = math.log(p)
    llp = math.log(lp)
    ln = math.log(n)
    lln = math.log(ln)
    return (math.log(n / ln) ** 2 / (2 * lp)
            + (0.5 + 1 / lp + llp / lp) * ln
            - (1 + llp / lp) * lln)


@dataclass(frozen=True)
class CLTPrediction:
    statistic: Statistic
    mean_coeff: float
    var_coeff: float

    def mean(self, n: float, m: int) -> float:
        return self.mean_coeff * math.log(n) ** m

    def variance(self, n: float, m: int) -> float:
        return self.var_coeff * math.log(n) ** m


def clt_prediction(system: BaseSystem, stat: Statistic) -> CLTPrediction:
    """Coefficients of (log n)^m in the mean and variance of ``stat``."""
    stat.check(system)
    k = kappa(system)
    d = system.digit_bound
    ld = math.log(d)
    if stat.kind == "sum":
        mean, var = k * (d - 1) / (2 * ld), k * (d - 1) * (d + 1) / (12 * ld)
    elif stat.kind == "weight":
        mean, var = k * (d - 1) / (d * ld), k * (d - 1) / (d * d * ld)
    else:
        mean, var = k / (d * ld), k * (d - 1) / (d * d * ld)
    return CLTPrediction(stat, mean, var)


def geometric_grid(start: float = 1000, ratio: float = 1.1, stop: float = 10**6) -> list[int]:
    """ceil(start * ratio^k) for k = 0, 1, ... while <= stop (duplicates dropped)."""
    out = []
    k = 0
    while True:
        # rounding first keeps 1000 * 1.1 from becoming 1100.0000000000002
        n = math.ceil(round(start * ratio**k, 6))
        if n > stop:
            return out
        if not out or n != out[-1]:
            out.append(n)
        k += 1
