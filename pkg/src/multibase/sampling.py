"""Uniform sampling of representations and normality reports."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction

from scipy.special import ndtr

from . import _modular as mod
from .asymptotics import clt_prediction
from .errors import DomainError, OutOfMemory
from .exact import (
    DISTRIBUTION_LIMIT,
    Distribution,
    build_count_table,
    exact_distribution,
    position_digit_counts,
)
from .model import BaseSystem, Representation, Statistic, statistic_value
from .smooth import elements_upto

SAMPLER_LIMIT = 10**5


@dataclass(frozen=True)
class Sampler:
    """Suffix count tables over the elements of S ∩ [1, n], largest first.

    ``layers[k][v]`` counts representations of ``v`` that only use
    ``items[k:]``; the last layer is the empty product.
    """

    system: BaseSystem
    n: int
    items: tuple[int, ...]
    layers: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return self.layers[0][self.n]


def build_sampler(system: BaseSystem, n: int, limit: int = SAMPLER_LIMIT) -> Sampler:
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > limit:
        raise OutOfMemory(f"sampler limited to n <= {limit}, got {n}")
    items = tuple(reversed(elements_upto(system.bases, n))) if n else ()
    mod.check_memory((len(items) + 1) * (n + 1) * 64, f"sampler tables for n={n}")
    d = system.digit_bound
    cur = [0] * (n + 1)
    cur[0] = 1
    layers = [tuple(cur)]
    for h in reversed(items):
        nxt = cur[:]
        dh = d * h
        for v in range(n, dh - 1, -1):
            nxt[v] -= nxt[v - dh]
        for v in range(h, n + 1):
            nxt[v] += nxt[v - h]
        layers.append(tuple(nxt))
        cur = nxt
    layers.reverse()
    return Sampler(system, n, items, tuple(layers))


def _rng(seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def sample(sampler: Sampler, rng=None) -> Representation:
    """One exactly uniform representation of ``sampler.n``.

    A single integer R is drawn uniformly below P(n).  At element h_k with
    remaining value v, R is uniform below layers[k][v]; digit a is taken
    when R falls in its block of size layers[k+1][v - a h_k], which gives
    each digit its exact conditional probability.
    """
    rng = _rng(rng)
    d = sampler.system.digit_bound
    layers = sampler.layers
    R = rng.randrange(sampler.total)
    v = sampler.n
    terms = []
    for k, h in enumerate(sampler.items):
        below = layers[k + 1]
        for a in range(d):
            if a * h > v:
                raise AssertionError("sampler tables are inconsistent")
            c = below[v - a * h]
            if R < c:
                break
            R -= c
        if a:
            terms.append((h, a))
            v -= a * h
    if v:
        raise AssertionError("sampler did not exhaust the target value")
    terms.reverse()
    return sampler.system.representation(terms)


def sample_many(sampler: Sampler, count: int, seed=None) -> list[Representation]:
    rng = _rng(seed)
    return [sample(sampler, rng) for _ in range(count)]


@dataclass
class StatReport:
    statistic: str
    n: int
    sample_count: object  # int, or "exact"
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    tv_distance_to_gaussian: float
    predicted_mean: float
    predicted_variance: float
    position: int = 1
    position_digit: int = 1
    position_digit_frequency: float = float("nan")
    seed: int | None = None
    exact_mean: str | None = None
    exact_variance: str | None = None
    total: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def gaussian_tv_distance(probs: dict, mean: float, var: float) -> float:
    """Total variation between a law on the integers and N(mean, var) binned
    into unit intervals centred on the integers."""
    if not probs:
        return 1.0
    if var <= 0:
        # a point mass against a degenerate Gaussian on the nearest integer
        j = round(mean)
        return 1.0 - probs.get(j, 0.0)
    sd = math.sqrt(var)
    lo, hi = min(probs), max(probs)
    diff = 0.0
    for j in range(lo, hi + 1):
        q = ndtr((j + 0.5 - mean) / sd) - ndtr((j - 0.5 - mean) / sd)
        diff += abs(probs.get(j, 0.0) - q)
    outside = ndtr((lo - 0.5 - mean) / sd) + ndtr(-(hi + 0.5 - mean) / sd)
    return float(min(1.0, 0.5 * (diff + outside)))


def _shape(mean, central2, central3, central4):
    if central2 <= 0:
        return 0.0, 0.0
    return central3 / central2**1.5, central4 / central2**2 - 3.0


def _exact_report(system, n, stat, position, digit) -> StatReport:
    table = build_count_table(system, n)
    dist: Distribution = exact_distribution(system, n, stat, table=table)
    mu = dist.mean()
    c2, c3, c4 = (dist.central_moment(k) for k in (2, 3, 4))
    skew, kurt = _shape(mu, float(c2), float(c3), float(c4))
    pred = clt_prediction(system, stat)
    freq = float("nan")
    if system.contains(position) and position <= n and digit < system.digit_bound:
        counts = position_digit_counts(table, n, position)
        freq = float(Fraction(counts[digit], table[n]))
    return StatReport(
        statistic=str(stat), n=n, sample_count="exact",
        mean=float(mu), variance=float(c2), skewness=skew, excess_kurtosis=kurt,
        tv_distance_to_gaussian=gaussian_tv_distance(dist.probabilities(), float(mu), float(c2)),
        predicted_mean=pred.mean(n, system.m), predicted_variance=pred.variance(n, system.m),
        position=position, position_digit=digit, position_digit_frequency=freq,
        exact_mean=str(mu), exact_variance=str(c2), total=str(table[n]))


def _sampled_report(system, n, stat, count, seed, position, digit) -> StatReport:
    sampler = build_sampler(system, n)
    reps = sample_many(sampler, count, seed)
    values = [statistic_value(r, stat) for r in reps]
    hist = Counter(values)
    N = len(values)
    mean = sum(values) / N
    c2, c3, c4 = (sum((x - mean) ** k for x in values) / N for k in (2, 3, 4))
    skew, kurt = _shape(mean, c2, c3, c4)
    pred = clt_prediction(system, stat)
    freq = sum(1 for r in reps if r.digit_at(position) == digit) / N
    return StatReport(
        statistic=str(stat), n=n, sample_count=N,
        mean=mean, variance=c2, skewness=skew, excess_kurtosis=kurt,
        tv_distance_to_gaussian=gaussian_tv_distance({k: c / N for k, c in hist.items()}, mean, c2),
        predicted_mean=pred.mean(n, system.m), predicted_variance=pred.variance(n, system.m),
        position=position, position_digit=digit, position_digit_frequency=freq,
        seed=seed, total=str(sampler.total))


def normality_report(system: BaseSystem, n: int, stat: Statistic, mode: str = "exact",
                     samples: int = 10_000, seed: int | None = 0,
                     position: int = 1, digit: int = 1) -> StatReport:
    """Moments of ``stat`` over representations of ``n`` and their distance
    to the Gaussian with the same mean and variance.

    ``mode="exact"`` uses the full distribution; ``mode="sampled"`` draws
    ``samples`` uniform representations with ``seed``.  The report also
    carries the leading-order CLT predictions and the frequency of
    ``digit`` at the element ``position``.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    stat.check(system)
    if mode == "exact":
        if n > DISTRIBUTION_LIMIT:
            raise OutOfMemory(f"exact mode limited to n <= {DISTRIBUTION_LIMIT}")
        return _exact_report(system, n, stat, position, digit)
    if mode == "sampled":
        if samples < 1:
            raise DomainError("need at least one sample")
        return _sampled_report(system, n, stat, int(samples), seed, position, digit)
    raise DomainError(f"unknown mode {mode!r}")
