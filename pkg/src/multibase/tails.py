"""Grid checks of the tail estimates behind the saddle-point method.

On the circle z = e^(-r + 2 pi i y) the generating function is compared
with its value at |z|, and the sum

    Sigma(r, y) = sum_{h in S, h <= 1/r} ||h y||^2

(|| . || the distance to the nearest integer) is checked against the
lower bounds A1 (y/r)^2 L^(m-1) for |y| <= r/2 and A2 L^(m-1) for
|y| >= r/2, with L = log(1/r).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, ToleranceUnreachable
from .model import BaseSystem
from .saddle import F, MAX_CUTOFF, U_RANGE, GFKind, _tail_power_sum
from .smooth import elements_upto

C_TAIL = 4 / (25 * math.e)
Y_RESOLUTION = 1024
RATIONAL_DENOMINATOR = 64
LOCAL_POINTS = 64


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    # decimal text keeps 1e-3 as 1/1000 instead of its binary neighbour
    return Fraction(repr(float(x)))


def _check_r(r) -> Fraction:
    rf = _as_fraction(r)
    if not 0 < rf < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    return rf


def _check_y(y) -> Fraction:
    yf = _as_fraction(y)
    if not -Fraction(1, 2) <= yf <= Fraction(1, 2):
        raise DomainError(f"y must lie in [-1/2, 1/2], got {y}")
    return yf


def _smooth_upto(system: BaseSystem, rf: Fraction) -> list[int]:
    return elements_upto(system.bases, math.floor(1 / rf))


def sigma_sum_exact(system: BaseSystem, r, y) -> Fraction:
    """Sigma(r, y) as an exact rational."""
    rf, yf = _check_r(r), _check_y(y)
    a, q = yf.numerator, yf.denominator
    total = 0
    for h in _smooth_upto(system, rf):
        k = h * a % q
        k = min(k, q - k)
        total += k * k
    return Fraction(total, q * q)


def sigma_sum(system: BaseSystem, r, y) -> float:
    return float(sigma_sum_exact(system, r, y))


def _log_ratio(system, ex, rf, yf, u, tol):
    """log |F(z, u)| - log F(|z|, u), truncated at h r <= T, and the
    certified bound on the discarded part."""
    r = float(rf)
    beta = sum(u**e for e in ex[1:])
    cutoff = 8.0
    while True:
        if beta * math.exp(-cutoff) < 0.5:
            bound = 4.0 * beta * _tail_power_sum(system.bases, cutoff / r, r, 0)
            if bound <= tol:
                break
        cutoff += 2.0
        if cutoff > MAX_CUTOFF:
            raise ToleranceUnreachable(f"cannot reach tol={tol} at r={r}")
    a, q = yf.numerator, yf.denominator
    hs = elements_upto(system.bases, cutoff / r)
    # exact fractional parts of h y keep the angles accurate for large h
    num = np.array([h * a % q for h in hs], dtype=float)
    keep = num != 0
    if not keep.any():
        return 0.0, bound
    h = np.array(hs, dtype=float)[keep]
    theta = 2 * math.pi * num[keep] / q
    w = np.exp(-h * r)
    d = len(ex)
    coef = np.array([u**e for e in ex], dtype=float)[:, None]
    pw = w[None, :] ** np.arange(d, dtype=float)[:, None]
    rot = np.exp(1j * np.arange(d, dtype=float)[:, None] * theta[None, :])
    num_abs = np.abs((coef * pw * rot).sum(axis=0))
    den = (coef * pw).sum(axis=0)
    return math.fsum(np.log(num_abs) - np.log(den)), bound


def tail_ratio(system: BaseSystem, kind: GFKind, r, y, u: float = 1.0,
               tol: float = 1e-12) -> float:
    """|F(e^(-r + 2 pi i y), u)| / F(e^(-r), u) for the given generating function.

    The product runs over h in S with h r <= T, T grown until the
    discarded factors change the log ratio by at most ``tol``.  Each
    factor has modulus at most 1, so the truncated value is never below
    the full ratio.
    """
    rf, yf = _check_r(r), _check_y(y)
    u = float(u)
    if not U_RANGE[0] <= u <= U_RANGE[1]:
        raise DomainError(f"u={u} outside [1/2, 2]")
    ex = kind.exponents(system.digit_bound)
    logr, _ = _log_ratio(system, ex, rf, yf, u, tol)
    return math.exp(logr)


@dataclass(frozen=True)
class TailPoint:
    r: float
    y: float
    u: float
    sigma: float
    ratio: float
    bound: float
    region: str  # "local" (|y| <= r/2) or "far"
    lemma2_ok: bool


def tail_point(system: BaseSystem, r, y, u: float = 1.0, kind: GFKind = F) -> TailPoint:
    """Sigma, the ratio and the bound exp(-C Sigma) at one point."""
    rf, yf = _check_r(r), _check_y(y)
    sig = sigma_sum(system, rf, yf)
    ratio = tail_ratio(system, kind, rf, yf, u)
    bound = math.exp(-C_TAIL * sig)
    region = "local" if abs(yf) <= rf / 2 else "far"
    return TailPoint(float(rf), float(yf), float(u), sig, ratio, bound, region,
                     ratio <= bound * (1 + 1e-12))


@dataclass
class TailSummary:
    r: float
    points: int
    fitted_A1: float
    fitted_A2: float
    min_sigma_far: float
    # smallest log ratio / (-C Sigma); at least 1 when the ratio bound holds
    min_margin: float
    violations: int


@dataclass
class TailReport:
    bases: tuple
    digit_bound: int
    kind: str
    u: float
    grid: str
    fitted_A1: float
    fitted_A2: float
    violations: int
    C: float = C_TAIL
    per_r: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def y_grid(r, resolution: int = Y_RESOLUTION, max_denominator: int = RATIONAL_DENOMINATOR,
           local_points: int = LOCAL_POINTS) -> list[Fraction]:
    """Uniform points, rationals a/q with q <= ``max_denominator`` and a
    fine grid on |y| <= r/2, all in [-1/2, 1/2] and sorted."""
    rf = _check_r(r)
    pts = set()
    if resolution >= 2:
        for j in range(resolution):
            pts.add(Fraction(2 * j - (resolution - 1), 2 * (resolution - 1)))
    for q in range(1, max_denominator + 1):
        for a in range(-(q // 2), q // 2 + 1):
            pts.add(Fraction(a, q))
    half = rf / 2
    for k in range(-local_points, local_points + 1):
        pts.add(half * Fraction(k, local_points))
    return sorted(pts)


def verify_tail_bounds(system: BaseSystem, r_list, y_resolution: int = Y_RESOLUTION,
                       kind: GFKind = F, u: float = 1.0,
                       max_denominator: int = RATIONAL_DENOMINATOR) -> TailReport:
    """Check the ratio bound exp(-C Sigma) and fit the Sigma lower bounds.

    The fitted constants are the largest values for which the bounds hold
    on the whole grid; a point with Sigma = 0 away from y = 0 counts as a
    violation because no positive constant can cover it.
    """
    m = system.m
    per_r, failures = [], []
    A1_all, A2_all = math.inf, math.inf
    total_viol = 0
    ex = kind.exponents(system.digit_bound)
    for r in r_list:
        rf = _check_r(r)
        if rf > Fraction(1, 100):
            raise DomainError(f"r must be <= 1e-2, got {r}")
        L = math.log(1 / float(rf))
        scale = L ** (m - 1)
        A1, A2 = math.inf, math.inf
        margin = math.inf
        viol = 0
        grid = y_grid(rf, y_resolution, max_denominator)
        for yf in grid:
            sig = sigma_sum_exact(system, rf, yf)
            logr, _ = _log_ratio(system, ex, rf, yf, u, 1e-12)
            local = abs(yf) <= rf / 2
            sigf = float(sig)
            ok = logr <= -C_TAIL * sigf + 1e-12
            if sig:
                margin = min(margin, logr / (-C_TAIL * sigf))
            if local:
                if yf:
                    A1 = min(A1, sigf / (float(yf / rf) ** 2 * scale))
            else:
                A2 = min(A2, sigf / scale)
            zero = yf != 0 and sig == 0
            if not ok or zero:
                viol += 1
                if len(failures) < 20:
                    failures.append({"r": float(rf), "y": str(yf), "sigma": sigf,
                                     "log_ratio": logr, "reason": "zero sigma" if zero else "ratio"})
        per_r.append(TailSummary(float(rf), len(grid), A1, A2,
                                 A2 * scale, margin, viol))
        A1_all, A2_all = min(A1_all, A1), min(A2_all, A2)
        total_viol += viol
    desc = (f"{y_resolution} uniform points, rationals a/q with q <= {max_denominator}, "
            f"{2 * LOCAL_POINTS + 1} points on |y| <= r/2")
    return TailReport(tuple(system.bases), system.digit_bound, str(kind), float(u), desc,
                      A1_all, A2_all, total_viol, C_TAIL, [asdict(s) for s in per_r], failures)
