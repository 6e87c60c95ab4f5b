"""Saddle-point evaluation of log F(e^-t, u) and its analogues.

For each element h of S the factor of the generating function is the
polynomial Q(w, u) = sum_a u^e(a) w^a in w = e^(-ht), where e(a) is the
per-digit statistic weight (e(a) = a for F, [a > 0] for G, [a = b] for
H_b).  Writing p_a = u^e(a) w^a / Q for the induced digit law, the
per-term partials are cumulant-like expressions:

    d/dt log Q     = -h E[a]
    d2/dt2         =  h^2 Var[a]
    d3/dt3         = -h^3 E[(a - Ea)^3]
    d/du           =  E[e] / u
    d2/du2         = (Var[e] - E[e]) / u^2
    d2/dtdu        = -h Cov[a, e] / u
    d3/dt2du       =  h^2 E[(a - Ea)^2 (e - Ee)] / u
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketFailure, DomainError, ToleranceUnreachable
from .model import BaseSystem, Statistic
from .smooth import counting_upper_bound, elements_upto

U_RANGE = (0.5, 2.0)
MAX_CUTOFF = 700.0
PARTIALS = ("f_t", "f_tt", "f_ttt", "f_u", "f_uu", "f_tu", "f_ttu")
# (number of t-derivatives, relative tolerance floor)
_PARTIAL_ORDER = {"f_t": 1, "f_tt": 2, "f_ttt": 3, "f_u": 0, "f_uu": 0, "f_tu": 1, "f_ttu": 2}
_RELAXED = {"f_ttt": 1e-6}
_EPS = 2.0**-52


@dataclass(frozen=True)
class GFKind:
    """Which generating function: F (sum of digits), G (weight) or H(b)."""

    name: str
    b: int | None = None

    def __post_init__(self):
        if self.name not in ("F", "G", "H"):
            raise DomainError(f"unknown generating function {self.name!r}")
        if (self.name == "H") != (self.b is not None):
            raise DomainError("H needs a digit b, F and G take none")
        if self.name == "H" and self.b < 1:
            raise DomainError("H(b) needs b >= 1")

    @classmethod
    def of(cls, stat: Statistic) -> GFKind:
        return {"sum": cls("F"), "weight": cls("G")}.get(stat.kind) or cls("H", stat.digit)

    @classmethod
    def parse(cls, text: str) -> GFKind:
        text = text.strip().upper()
        if text in ("F", "G"):
            return cls(text)
        if text.startswith("H"):
            return cls("H", int(text[1:].lstrip(":")))
        raise DomainError(f"unknown generating function {text!r}")

    def exponents(self, d: int) -> list[int]:
        if self.name == "F":
            return list(range(d))
        if self.name == "G":
            return [0] + [1] * (d - 1)
        if self.b > d - 1:
            raise DomainError(f"H({self.b}) needs b <= d-1 = {d - 1}")
        return [1 if a == self.b else 0 for a in range(d)]

    def __str__(self):
        return f"H{self.b}" if self.name == "H" else self.name


F = GFKind("F")


@dataclass(frozen=True)
class SaddleEvaluation:
    t: float
    u: float
    kind: GFKind
    value: float
    f_t: float
    f_tt: float
    f_ttt: float
    f_u: float
    f_uu: float
    f_tu: float
    f_ttu: float
    truncation_cutoff: float
    tail_bound: float
    partial_tail_bounds: dict = field(default_factory=dict)
    terms: int = 0


def _tail_power_sum(bases, x: float, t: float, j: int) -> float:
    """Upper bound for sum_{h in S, h > x} h^j e^(-h t).

    The range (x, inf) is cut into blocks (x 2^i, x 2^(i+1)]; a block holds
    at most |S ∩ [1, x 2^(i+1)]| elements, each with h^j <= (x 2^(i+1))^j
    and e^(-ht) <= e^(-x 2^i t).
    """
    total = 0.0
    i = 0
    while True:
        lo = x * 2.0**i
        hi = 2.0 * lo
        if hi < 1.0:
            # no element of S lies below 1
            i += 1
            continue
        log_term = math.log(counting_upper_bound(bases, hi)) + j * math.log(hi) - lo * t
        if log_term < -745.0 and lo * t > 2.0 * j + 2.0:
            return total
        total += math.exp(log_term)
        i += 1


def _coefficient_bounds(ex: list[int], u: float) -> dict:
    # beta[k, l] = sum_{a>=1} a^k |d^l/du^l u^e(a)|
    beta = {}
    for k in range(4):
        for l in range(3):
            s = 0.0
            for a in range(1, len(ex)):
                e = ex[a]
                if l == 0:
                    c = u**e
                elif l == 1:
                    c = e * u ** (e - 1) if e >= 1 else 0.0
                else:
                    c = e * (e - 1) * u ** (e - 2) if e >= 2 else 0.0
                s += a**k * abs(c)
            beta[k, l] = s
    return beta


def _per_term_constants(ex, u):
    b = _coefficient_bounds(ex, u)
    return {
        "value": b[0, 0],
        "f_t": b[1, 0],
        "f_tt": b[2, 0] + b[1, 0] ** 2,
        "f_ttt": b[3, 0] + 3 * b[2, 0] * b[1, 0] + 2 * b[1, 0] ** 3,
        "f_u": b[0, 1],
        "f_uu": b[0, 2] + b[0, 1] ** 2,
        "f_tu": b[1, 1] + b[1, 0] * b[0, 1],
        "f_ttu": b[2, 1] + b[2, 0] * b[0, 1] + 2 * b[1, 0] * b[1, 1] + 2 * b[1, 0] ** 2 * b[0, 1],
    }


def _tail_bounds(bases, ex, t, u, cutoff):
    consts = _per_term_constants(ex, u)
    x = cutoff / t
    sums = {j: _tail_power_sum(bases, x, t, j) for j in range(4)}
    out = {"value": consts["value"] * sums[0]}
    for name in PARTIALS:
        out[name] = consts[name] * sums[_PARTIAL_ORDER[name]]
    return out


def _sum_terms(bases, ex, t, u, cutoff):
    hs = np.array(elements_upto(bases, cutoff / t), dtype=float)
    d = len(ex)
    a = np.arange(d, dtype=float)[:, None]
    e = np.array(ex, dtype=float)[:, None]
    w = np.exp(-hs * t)
    # wa[a] = u^e(a) w^a, built by repeated multiplication
    pw = np.empty((d, hs.size))
    pw[0] = 1.0
    for k in range(1, d):
        pw[k] = pw[k - 1] * w
    wa = pw * (u ** e)
    tail = wa[1:].sum(axis=0)
    q = 1.0 + tail
    p = wa / q
    mu_a = (a * p).sum(axis=0)
    mu_e = (e * p).sum(axis=0)
    da = a - mu_a
    de = e - mu_e
    var_a = (da**2 * p).sum(axis=0)
    m3_a = (da**3 * p).sum(axis=0)
    var_e = (de**2 * p).sum(axis=0)
    cov_ae = (da * de * p).sum(axis=0)
    m21 = (da**2 * de * p).sum(axis=0)
    terms = {
        "value": np.log1p(tail),
        "f_t": -hs * mu_a,
        "f_tt": hs**2 * var_a,
        "f_ttt": -(hs**3) * m3_a,
        "f_u": mu_e / u,
        "f_uu": (var_e - mu_e) / u**2,
        "f_tu": -hs * cov_ae / u,
        "f_ttu": hs**2 * m21 / u,
    }
    # magnitude of what was summed; the rounding noise of each partial is
    # about machine epsilon times this
    scale = {k: math.fsum(np.abs(v)) for k, v in terms.items()}
    scale["f_uu"] = math.fsum(np.abs(var_e) + np.abs(mu_e)) / u**2
    return {k: math.fsum(v) for k, v in terms.items()}, scale, hs.size


def _check_point(t, u, allow_wide_u):
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if not u > 0:
        raise DomainError(f"u must be positive, got {u}")
    if not U_RANGE[0] <= u <= U_RANGE[1]:
        if not allow_wide_u:
            raise DomainError(f"u={u} outside [1/2, 2]; pass allow_wide_u to override")
        warnings.warn(f"u={u} outside [1/2, 2]; estimates are outside the proven regime",
                      stacklevel=3)


def evaluate_f(system: BaseSystem, kind: GFKind, t: float, u: float = 1.0,
               tol: float = 1e-12, allow_wide_u: bool = False) -> SaddleEvaluation:
    """Truncated series for the value and partials with a certified tail.

    The value's tail is bounded by ``tol`` in absolute terms; each partial
    derivative's tail by ``tol`` relative to its magnitude (at least 1e-6
    for the third t-derivative), or by the rounding noise of the summed
    terms when cancellation leaves the partial smaller than that.
    """
    t, u = float(t), float(u)
    _check_point(t, u, allow_wide_u)
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    ex = kind.exponents(system.digit_bound)
    bases = system.bases
    cutoff = 8.0
    while _tail_bounds(bases, ex, t, u, cutoff)["value"] > tol:
        cutoff += 2.0
        if cutoff > MAX_CUTOFF:
            raise ToleranceUnreachable(f"cannot reach tol={tol} at t={t}")
    while True:
        vals, scale, nterms = _sum_terms(bases, ex, t, u, cutoff)
        bounds = _tail_bounds(bases, ex, t, u, cutoff)
        ok = all(bounds[k] <= max(max(tol, _RELAXED.get(k, 0.0)) * abs(vals[k]),
                                  _EPS * scale[k])
                 for k in PARTIALS)
        if ok:
            break
        cutoff += 4.0
        if cutoff > MAX_CUTOFF:
            raise ToleranceUnreachable(f"cannot reach tol={tol} at t={t}")
    return SaddleEvaluation(
        t=t, u=u, kind=kind, value=vals["value"],
        **{k: vals[k] for k in PARTIALS},
        truncation_cutoff=cutoff, tail_bound=bounds["value"],
        partial_tail_bounds={k: bounds[k] for k in PARTIALS}, terms=nterms)


@dataclass(frozen=True)
class SaddleResult:
    n: int
    r: float
    u: float
    kind: GFKind
    log_estimate: float
    estimate: float
    residual: float
    chernoff_bound: float
    evaluation: SaddleEvaluation


def solve_saddle(system: BaseSystem, kind: GFKind, n: int, u: float = 1.0,
                 tol: float = 1e-10, allow_wide_u: bool = False,
                 bracket: tuple[float, float] = (1e-15, 10.0)) -> SaddleResult:
    """Positive root r of n = -f_t(r, u); bisection in log r, then Newton."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    eval_tol = min(1e-12, tol / 10)

    def ev(r):
        return evaluate_f(system, kind, r, u, eval_tol, allow_wide_u)

    lo, hi = bracket
    for attempt in range(2):
        g_lo, g_hi = -ev(lo).f_t, -ev(hi).f_t
        if g_lo >= n >= g_hi:
            break
        if attempt == 1:
            raise BracketFailure(f"n={n} not bracketed by r in [{lo}, {hi}]")
        lo, hi = lo * 1e-10, hi * 5.0
    llo, lhi = math.log(lo), math.log(hi)
    while lhi - llo > 1e-6:
        mid = 0.5 * (llo + lhi)
        if -ev(math.exp(mid)).f_t > n:
            llo = mid
        else:
            lhi = mid
    r = math.exp(0.5 * (llo + lhi))
    e = ev(r)
    for _ in range(60):
        gap = -e.f_t - n
        if abs(gap) <= tol * n:
            break
        r_new = r + gap / e.f_tt
        if not math.exp(llo) * 0.5 < r_new < math.exp(lhi) * 2:
            raise BracketFailure(f"Newton step left the bracket at n={n}")
        r = r_new
        e = ev(r)
    residual = abs(n + e.f_t) / n
    if residual > tol:
        raise BracketFailure(f"saddle residual {residual:.3g} above tol {tol:.3g}")
    chernoff = n * r + e.value
    log_est = chernoff - 0.5 * math.log(2 * math.pi * e.f_tt)
    est = math.exp(log_est) if log_est < 709 else math.inf
    return SaddleResult(n=n, r=r, u=u, kind=kind, log_estimate=log_est, estimate=est,
                        residual=residual, chernoff_bound=chernoff, evaluation=e)


def estimate_count(system: BaseSystem, n: int, tol: float = 1e-10) -> SaddleResult:
    """Saddle-point approximation of P(n) at u = 1.

    ``chernoff_bound`` = n r + f(r, 1) is a rigorous upper bound for
    log P(n); ``log_estimate`` subtracts the Gaussian width term.
    """
    if int(n) < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return solve_saddle(system, F, n, 1.0, tol)


def chernoff_log_bound(system: BaseSystem, n: int, r: float) -> float:
    """n r + f(r, 1) plus the certified truncation error: >= log P(n)."""
    e = evaluate_f(system, F, r, 1.0)
    return n * r + e.value + e.tail_bound


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    variance: float
    r0: float
    statistic: Statistic
    evaluation: SaddleEvaluation

    def __iter__(self):
        return iter((self.mean, self.variance))


def estimate_moments(system: BaseSystem, n: int, stat: Statistic,
                     refined: bool = False) -> MomentEstimate:
    """Saddle-point mean and variance of a digit statistic.

    mean     = f_u + (f_tu f_ttt - f_tt f_ttu) / (2 f_tt^2)
    variance = f_uu + f_u               (refined: minus f_tu^2 / f_tt)

    all evaluated at (r0, 1) with r0 the u = 1 saddle point, using the
    generating function that marks ``stat``.
    """
    if int(n) < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    stat.check(system)
    kind = GFKind.of(stat)
    res = solve_saddle(system, kind, n, 1.0)
    e = res.evaluation
    mean = e.f_u + (e.f_tu * e.f_ttt - e.f_tt * e.f_ttu) / (2 * e.f_tt**2)
    var = e.f_uu + e.f_u
    if refined:
        var -= e.f_tu**2 / e.f_tt
    return MomentEstimate(mean, var, res.r, stat, e)
